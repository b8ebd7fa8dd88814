"""Constants behind the uniform size bound in the recurrent window.

In the recurrent window an index with a small numerator makes |f^(n-1)(0)|
an unusually good rational approximation to zeta = |c|^(1/d).  Mahler's
effective form of Thue's theorem limits how many such approximations can
occur past a threshold index, which turns into the bounds 23, 12 and 9 on
the size of the Zsigmondy set for d = 2, d = 4 and d >= 6.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Union

import mpmath

from .arith import log_abs_int
from .orbit import LazyOrbit, Orbit, Parameter, ParameterError, extend_orbit
from .regions import in_recurrent_window

ADMISSIBILITY_MARGIN = 1e-2

# The value printed for the d = 2 gap; 5 d^2 / (2 eps) is 2500 at eps = 0.004.
ALT_GAP_ARGUMENT_D2 = 15000


def kappa(d: int, mu: float, eps: float) -> float:
    """(sqrt((1 - 2 eps)/d) - 2 sqrt(eps)) mu - (1 + eps)^2; may be negative."""
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    if not mu > math.sqrt(d):
        raise ValueError("mu must exceed sqrt(d)")
    return (math.sqrt((1 - 2 * eps) / d) - 2 * math.sqrt(eps)) * mu - (1 + eps) ** 2


def mu_for(d: int, m: int) -> float:
    return d * (1 - d ** (-m))


@dataclass(frozen=True)
class MahlerParams:
    d: int
    m: int
    eps: float
    mu: float
    kappa: float
    n1_threshold: float
    n1_min: int
    gap: float
    N: int
    size_bound: int
    R_bound: str = "R = |a| < 2b"
    gap_alternative: float | None = None
    notes: tuple[str, ...] = ()
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        out["notes"] = list(self.notes)
        return out


def _table_entry(d: int) -> tuple[int, float, int]:
    if d == 2:
        return 6, 0.004, 6
    if d == 4:
        return 2, 1 / 128, 3
    return 1, 1 / d**3, 2


def admissibility_checks(d: int, m: int, eps: float, N: int) -> dict[str, tuple[float, bool]]:
    """Each condition as (margin, ok); integer conditions carry no margin requirement."""
    mu = mu_for(d, m)
    k = kappa(d, mu, eps)
    thr = math.log(24 / (k * eps), d) + 2
    gap = math.log(5 * d * d / (2 * eps), d)
    checks = {
        "kappa > 0": (k, k > ADMISSIBILITY_MARGIN),
        "mu > sqrt(d)": (mu - math.sqrt(d), mu - math.sqrt(d) > ADMISSIBILITY_MARGIN),
        "1 <= m <= 6": (0.0, 1 <= m <= 6),
        "1 <= N <= 6": (0.0, 1 <= N <= 6),
        "2m + 6 >= n1 threshold": (2 * m + 6 - thr, 2 * m + 6 - thr >= ADMISSIBILITY_MARGIN),
        # no two consecutive good approximations, so N may be taken as floor(gap / 2)
        "gap / 2 < N + 1": (N + 1 - gap / 2, N + 1 - gap / 2 >= ADMISSIBILITY_MARGIN),
    }
    if d >= 6:
        checks["gap <= 6"] = (6 - gap, 6 - gap >= ADMISSIBILITY_MARGIN)
        checks["kappa > 24/d^3"] = (k - 24 / d**3, k - 24 / d**3 >= 0)
    return checks


def standard_params(d: int) -> MahlerParams:
    if d < 2 or d % 2:
        raise ParameterError(f"the approximation constants are only set up for even d, not {d}")
    m, eps, N = _table_entry(d)
    mu = mu_for(d, m)
    k = kappa(d, mu, eps)
    thr = math.log(24 / (k * eps), d) + 2
    n1_min = math.ceil(thr)
    assert n1_min <= 2 * m + 6, (d, n1_min)
    gap = math.log(5 * d * d / (2 * eps), d)
    alternative = None
    notes = []
    if d == 2:
        # the canonical table keeps N_2 = 6, which is still
        # admissible with either value of the gap
        alternative = math.log2(ALT_GAP_ARGUMENT_D2)
        notes.append(
            f"gap discrepancy: 5d^2/(2eps) = {5 * d * d / (2 * eps):g} gives log2 = {gap:.4f}; "
            f"the alternative argument {ALT_GAP_ARGUMENT_D2} gives {alternative:.4f}"
        )
        checks = admissibility_checks(d, m, eps, N)
        checks["gap / 2 < N + 1 (alternative gap)"] = (N + 1 - alternative / 2, N + 1 - alternative / 2 >= ADMISSIBILITY_MARGIN)
    else:
        checks = admissibility_checks(d, m, eps, N)
    return MahlerParams(
        d=d, m=m, eps=eps, mu=mu, kappa=k, n1_threshold=thr, n1_min=n1_min, gap=gap, N=N,
        size_bound=2 * m + 6 - 1 + N, gap_alternative=alternative, notes=tuple(notes), checks=checks,
    )


def size_bound(d: int) -> int:
    return standard_params(d).size_bound


def mahler_table(degrees) -> list[MahlerParams]:
    return [standard_params(d) for d in degrees]


# -- good approximations ------------------------------------------------------

OrbitLike = Union[Orbit, LazyOrbit]


def _lazy(orbit: OrbitLike) -> LazyOrbit:
    return orbit if isinstance(orbit, LazyOrbit) else LazyOrbit(orbit.parameter, orbit=orbit)


def good_approx_test(orbit: OrbitLike, n: int, m: int) -> bool:
    """|f^n(0)| <= (b^(d^(n-2)))^(-d(1 - d^(-m))), decided without rounding.

    Clearing the denominator b^(d^(n-1)) turns this into |a_n| <= b^(d^(n-1-m)),
    or |a_n|^(d^(m+1-n)) <= b when the exponent is negative.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    lazy = _lazy(orbit)
    p = lazy.param
    if not in_recurrent_window(p):
        raise ParameterError(f"{p} is outside the recurrent window")
    d, b = p.d, p.b
    e = n - 1 - m
    log_b = math.log(b)

    def exact_fn(a_n: int) -> bool:
        a_n = abs(a_n)
        lhs = log_abs_int(a_n) * (d ** (-e) if e < 0 else 1)
        rhs = log_b * (d**e if e >= 0 else 1)
        if abs(lhs - rhs) > 1e-6 * max(1.0, rhs):
            return lhs < rhs
        return a_n <= b ** (d**e) if e >= 0 else a_n ** (d ** (-e)) <= b

    def interval_fn(enc):
        lhs = enc.log_abs_numerator(n)
        if e >= 0:
            return lhs <= enc.ctx.mpf(d**e) * enc.log_b
        return lhs * d ** (-e) <= enc.log_b

    return lazy.certify(n, exact_fn, interval_fn)


def good_approx_indices(param: Parameter, m: int, n_lo: int, n_hi: int, lazy: LazyOrbit | None = None) -> list[int]:
    lazy = lazy or LazyOrbit(param)
    return [n for n in range(max(n_lo, 2), n_hi + 1) if good_approx_test(lazy, n, m)]


@dataclass(frozen=True)
class ApproximationLink:
    n: int
    distance: float  # | |f^(n-1)(0)| - zeta |
    abs_iterate: float  # |f^n(0)|
    holds: bool


def approximation_link(orbit: Orbit, n: int) -> ApproximationLink:
    """Check | |a_(n-1)|/b^(d^(n-2)) - |c|^(1/d) | < |f^n(0)| on exact values."""
    if n < 2:
        raise ValueError("n must be >= 2")
    orbit = extend_orbit(orbit, n)
    p = orbit.parameter
    if not (p.a < 0 and abs(p.a) > p.b):
        raise ParameterError("the link needs c < -1")
    bits = max(abs(orbit.numerator(n)).bit_length(), orbit.term(n).denom_exp * p.b.bit_length())
    with mpmath.workprec(bits + 64):
        x = abs(mpmath.mpf(orbit.numerator(n - 1))) / mpmath.mpf(p.b) ** orbit.term(n - 1).denom_exp
        zeta = mpmath.root(mpmath.mpf(-p.a) / p.b, p.d)
        dist = abs(x - zeta)
        fn = abs(mpmath.mpf(orbit.numerator(n))) / mpmath.mpf(p.b) ** orbit.term(n).denom_exp
        return ApproximationLink(n, float(dist), float(fn), bool(dist < fn))


def non_consecutive_check(orbit: OrbitLike | Parameter, n_max: int) -> bool:
    """No two consecutive n <= n_max have |f^n(0)| < 1/2."""
    lazy = LazyOrbit(orbit) if isinstance(orbit, Parameter) else _lazy(orbit)
    if not in_recurrent_window(lazy.param):
        raise ParameterError(f"{lazy.param} is outside the recurrent window")
    small = [lazy.abs_iterate_below(n, 1, 2) for n in range(1, n_max + 1)]
    return not any(x and y for x, y in zip(small, small[1:]))


def orbit_bounded_by_c(orbit: OrbitLike | Parameter, n_max: int) -> bool:
    """|f^n(0)| <= |c| for 1 <= n <= n_max (strict for n >= 2 when b >= 2)."""
    lazy = LazyOrbit(orbit) if isinstance(orbit, Parameter) else _lazy(orbit)
    p = lazy.param
    return all(lazy.abs_iterate_below(n, abs(p.a), p.b) for n in range(2, n_max + 1))
