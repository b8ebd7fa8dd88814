"""Heights, the size inequalities that every Zsigmondy index must satisfy,
and the effective threshold M(c) derived from an irrationality measure.

A member n of the Zsigmondy set has |a_n| <= prod_q |a_{n/q}| over the
distinct primes q | n.  Dividing through by the denominators gives

    log|f^n(0)| + d^(n-1) log b <= sum_q [log|f^(n/q)(0)| + d^(n/q-1) log b],

and each mode of :func:`zsig_inequality` replaces the right-hand iterates by
a different upper bound.  Whenever a report has ``holds == False`` the index
is certainly outside the set.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .arith import LOG2, log_abs_int, prime_divisors
from .orbit import InconclusiveError, Orbit, Parameter, ParameterError, extend_orbit, log_abs_iterate
from .regions import in_recurrent_window, power_triple

SLACK = 1e-9


class Mode(str, enum.Enum):
    EXACT = "EXACT"
    ABS_C = "ABS_C"
    POSITIVE_C = "POSITIVE_C"


class TailCertificationError(RuntimeError):
    """The coarse tail bound does not yet dominate at the probe index."""


def weil_height(r) -> float:
    """log max(|numerator|, denominator) of a rational."""
    r = Fraction(r)
    return log_abs_int(max(abs(r.numerator), r.denominator)) if r else 0.0


@dataclass(frozen=True)
class DivisorTerms:
    n: int
    d: int
    s: int
    omega: int

    @property
    def log_s(self) -> float:
        return log_abs_int(self.s)

    def coarse_bounds_hold(self) -> bool:
        # s_d(n) <= d^(n/2) log2 n and omega(n) <= log2 n, compared in log space
        log2n = math.log2(self.n)
        s_ok = self.log_s <= 0.5 * self.n * math.log(self.d) + math.log(log2n) + SLACK
        return s_ok and self.omega <= log2n


def divisor_terms(n: int, d: int) -> DivisorTerms:
    """s_d(n) = sum over primes q | n of d^(n/q), and the count of those primes."""
    if n < 2:
        raise ValueError("divisor terms need n >= 2")
    qs = prime_divisors(n)
    return DivisorTerms(n, d, sum(d ** (n // q) for q in qs), len(qs))


# -- heights ----------------------------------------------------------------


@dataclass(frozen=True)
class HeightEstimate:
    value: float
    error_bound: float
    level: int
    lower: float
    upper: float

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def _iv_max(x, y):
    if x.a >= y.b:
        return x
    if y.a >= x.b:
        return y
    return x.ctx.mpf([x.a if x.a >= y.a else y.a, x.b if x.b >= y.b else y.b])


def _down(x) -> float:
    return math.nextafter(float(x), -math.inf)


def _up(x) -> float:
    return math.nextafter(float(x), math.inf)


def _h_level(orbit: Orbit, n: int, ctx: MPIntervalContext):
    """Interval for h(f^n(0)) / d^n."""
    t = orbit.term(n)
    p = orbit.parameter
    log_num = ctx.log(ctx.mpf(abs(t.numerator)))
    log_den = ctx.mpf(t.denom_exp) * ctx.log(p.b) if p.b > 1 else ctx.mpf(0)
    return _iv_max(log_num, log_den) / p.d**n


def _interval_ctx(prec: int = 128) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def height_error_bound(param: Parameter, level: int) -> float:
    return (weil_height(param.c) + LOG2) / ((param.d - 1) * param.d**level)


def canonical_height_estimate(orbit: Orbit, N: int, *, require_positive: bool = False) -> HeightEstimate:
    """h(f^N(0))/d^N with a rigorous enclosure of the canonical height of 0."""
    if N < 1:
        raise ValueError("level must be >= 1")
    orbit = extend_orbit(orbit, N)
    p = orbit.parameter
    ctx = _interval_ctx()
    h = _h_level(orbit, N, ctx)
    err = (ctx.log(ctx.mpf(max(abs(p.a), p.b))) + ctx.log(2)) / ((p.d - 1) * p.d**N)
    enclosure = h + ctx.mpf([-err.b, err.b])
    lower = max(_down(enclosure.a), 0.0)
    upper = _up(enclosure.b)
    value = float(h.mid)
    if require_positive and lower <= 0:
        raise InconclusiveError(f"level {N} does not separate the canonical height of {p} from 0")
    return HeightEstimate(value, height_error_bound(p, N), N, lower, upper)


def height_cauchy_steps(orbit: Orbit, n_max: int) -> list[tuple[int, float, float, bool]]:
    """(N, |h_{N+1} - h_N|, allowed step, ok) for N < n_max, h_N = h(f^N(0))/d^N.

    ``ok`` is False only when the enclosures prove the step too large, so an
    exact tie (c = 1 at N = 1) counts as holding.
    """
    orbit = extend_orbit(orbit, n_max)
    p = orbit.parameter
    ctx = _interval_ctx()
    hs = [_h_level(orbit, n, ctx) for n in range(1, n_max + 1)]
    c_const = ctx.log(ctx.mpf(max(abs(p.a), p.b))) + ctx.log(2)
    out = []
    for n in range(1, n_max):
        step = abs(hs[n] - hs[n - 1])
        allowed = c_const / p.d ** (n + 1)
        out.append((n, _up(step.b), _down(allowed.a), not step.a > allowed.b))
    return out


# -- size inequalities --------------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    n: int
    mode: str
    lhs: float
    rhs: float
    holds: bool
    marginal: bool
    terms: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def _report(n: int, mode: Mode, lhs: float, rhs: float, terms: dict, holds: bool | None = None) -> InequalityReport:
    # inside the slack zone the index cannot be excluded, so holds stays True
    scale = max(1.0, abs(lhs), abs(rhs))
    marginal = holds is None and abs(lhs - rhs) <= SLACK * scale
    if holds is None:
        holds = marginal or lhs <= rhs
    return InequalityReport(n, mode.value, lhs, rhs, holds, marginal, terms)


def zsig_inequality(orbit: Orbit, n: int, mode: Mode | str = Mode.EXACT) -> InequalityReport:
    """Evaluate the necessary size condition for n to lie in the Zsigmondy set."""
    mode = Mode(mode)
    if n < 2:
        raise ValueError("n must be >= 2")
    orbit = extend_orbit(orbit, n)
    p = orbit.parameter
    dt = divisor_terms(n, p.d)
    qs = prime_divisors(n)
    log_b = math.log(p.b)
    terms = {"s_d": dt.s, "omega": dt.omega, "log_b": log_b}

    if mode is Mode.EXACT:
        a_n = abs(orbit.numerator(n))
        g = math.prod(abs(orbit.numerator(n // q)) for q in qs)
        lhs, rhs = log_abs_int(a_n), log_abs_int(g)
        terms.update({f"log|a_{n // q}|": log_abs_int(orbit.numerator(n // q)) for q in qs})
        return _report(n, mode, lhs, rhs, terms, holds=a_n <= g)

    lhs = log_abs_iterate(orbit, n) + p.d ** (n - 1) * log_b
    if mode is Mode.ABS_C:
        if not in_recurrent_window(p):
            raise ParameterError(f"|f^k(0)| <= |c| is only available in the recurrent window, not for {p}")
        log_c = math.log(abs(p.a)) - log_b
        rhs = dt.omega * log_c + dt.s / p.d * log_b
        terms.update({"log|c|": log_c, "omega*log|c|": dt.omega * log_c, "s_d/d*log_b": dt.s / p.d * log_b})
        return _report(n, mode, lhs, rhs, terms)

    if p.a <= 0:
        raise ParameterError(f"the positive-c bounds need c > 0, not {p}")
    log_c = math.log(p.a) - log_b

    def log_C(k: int) -> float:
        return max(log_c, p.d ** (k - 1) * log_c)

    # f^n(0) >= C(n) on the left, f^k(0) <= 2^((d^(k-1)-1)/(d-1)) C(k) on the right
    lhs = log_C(n) + p.d ** (n - 1) * log_b
    rhs = sum((p.d ** (n // q - 1) - 1) / (p.d - 1) * LOG2 + log_C(n // q) + p.d ** (n // q - 1) * log_b for q in qs)
    terms.update({"log|c|": log_c, "log C(n)": log_C(n)})
    return _report(n, mode, lhs, rhs, terms)


def positive_c_bounds_hold(orbit: Orbit, n: int) -> bool:
    """C(n) <= f^n(0) <= 2^((d^(n-1)-1)/(d-1)) C(n), checked on exact rationals."""
    p = orbit.parameter
    x = orbit.iterate(n)
    cn = max(p.c, p.c ** (p.d ** (n - 1)))
    # the exponent is 1 + d + ... + d^(n-2), an integer
    return cn <= x <= 2 ** ((p.d ** (n - 1) - 1) // (p.d - 1)) * cn


# -- effective M(c) -----------------------------------------------------------


def _failure_gap(param: Parameter, eps, tau, n: int) -> mpmath.mpf:
    """rhs - lhs of the condition that keeps n alive; >= 0 means n is not excluded."""
    dt = divisor_terms(n, param.d)
    log_b = mpmath.log(param.b)
    log_c = mpmath.log(mpmath.mpf(abs(param.a)) / param.b)
    lhs = (mpmath.mpf(tau) / 2 * mpmath.mpf(param.d) ** (n - 1) - mpmath.mpf(dt.s) / param.d) * log_b
    rhs = mpmath.log(1 / mpmath.mpf(eps)) + dt.omega * log_c
    return rhs - lhs


def m_failure_condition(param: Parameter, eps, tau, n: int) -> bool:
    """True when the irrationality-measure argument does not exclude index n."""
    with mpmath.workdps(40):
        return _failure_gap(param, eps, tau, n) >= 0


def _tail_certified(param: Parameter, eps, tau, n0: int) -> bool:
    # With A(n) = tau/2 d^(n-1), B(n) = d^(n/2-1) log2 n and the coarse
    # bounds s_d(n)/d <= B(n), omega(n) <= log2 n, the gap
    #   g(n) = (A - B) log b - log(1/eps) - log2(n) log|c|
    # is increasing for n >= n0 once A(n0) >= B(n0), sqrt(d) r <= d with
    # r = log(n0+1)/log(n0), and (d - sqrt(d) r) B(n0) log b beats the
    # growth log2(1 + 1/n0) log|c| of the last term.
    d = mpmath.mpf(param.d)
    log_b = mpmath.log(param.b)
    log_c = mpmath.log(mpmath.mpf(abs(param.a)) / param.b)
    A = mpmath.mpf(tau) / 2 * d ** (n0 - 1)
    B = d ** (mpmath.mpf(n0) / 2 - 1) * mpmath.log(n0, 2)
    r = mpmath.log(n0 + 1) / mpmath.log(n0)
    g = (A - B) * log_b - mpmath.log(1 / mpmath.mpf(eps)) - mpmath.log(n0, 2) * log_c
    growth_ok = (d - mpmath.sqrt(d) * r) * B * log_b > mpmath.log(1 + mpmath.mpf(1) / n0, 2) * log_c
    return A >= B and g > 0 and mpmath.sqrt(d) * r <= d and growth_ok


def effective_M_solver(param: Parameter, eps, tau, n_probe: int = 64) -> int:
    """Least M such that every n >= M violates the surviving-index condition.

    ``eps`` and ``tau`` are the constants of an effective irrationality
    measure ||b^n xi|| > eps b^(-(1-tau) n) for xi = sqrt(|c|); they are
    inputs, not computed here.
    """
    if not in_recurrent_window(param):
        raise ParameterError(f"{param} is outside the recurrent window")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    if n_probe < 3:
        raise ValueError("n_probe must be >= 3")
    with mpmath.workdps(40):
        alive = [n for n in range(2, n_probe + 1) if _failure_gap(param, eps, tau, n) >= 0]
        if not _tail_certified(param, eps, tau, n_probe + 1):
            raise TailCertificationError(f"tail bound not yet decisive at n = {n_probe + 1}; raise n_probe")
    return max(alive) + 1 if alive else 2


# -- reducible case -----------------------------------------------------------


def reducible_lower_bound(param: Parameter, n: int) -> float:
    """log of 1/(d b^(d^(n-1)/2)), a lower bound on |f^n(0)| when -a, b are m-th powers."""
    if param.d % 2:
        raise ParameterError("the reducible bound needs d even")
    if power_triple(param) is None:
        raise ParameterError(f"no m | {param.d}, m > 1, makes both {-param.a} and {param.b} m-th powers")
    if n < 2:
        raise ValueError("n must be >= 2")
    return -math.log(param.d) - 0.5 * param.d ** (n - 1) * math.log(param.b)
