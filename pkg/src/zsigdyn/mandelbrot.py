"""Periodic cycles of z^2 + c and the attracting regions D(n, rho).

D(n, rho) is the set of complex c for which 0 lies in the basin of an
attracting cycle of exact period n whose multiplier has modulus at most rho.
A quadratic polynomial has at most one attracting cycle and, when it has
one, the critical orbit converges to it.  So membership in every D(n, rho)
at once is settled by following the critical orbit, and a negative answer
for a single n can be certified by the contraction rate the basin forces on
the critical orbit (see :func:`contraction_radii`).

Everything here is double precision with residual-based tolerances;
undecidable cases come back as ``None`` rather than a guess.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .arith import prime_divisors
from .bounds import InequalityReport, divisor_terms

MAX_PERIOD = 12
ESCAPE_RADIUS = 2.0
_HUGE = 1e30


class RootFindingError(RuntimeError):
    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class PreconditionError(ValueError):
    pass


def rho_n(n: int) -> float:
    """min(1/4, 2^(-2^(n-2)))."""
    if n < 1:
        raise ValueError("period must be >= 1")
    if n <= 3:
        return 0.25
    return math.ldexp(1.0, -(2 ** (n - 2)))


def default_tol(n: int) -> float:
    return 1e-10 * 2**n


def parse_complex(text: str) -> complex:
    """'-7/4', '0.25+0.5j', '-1.75', 'i' ..."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if "/" in t and "j" not in t:
        return complex(float(Fraction(t)))
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    return complex(t)


def iterate_critical(c: complex, n: int) -> complex:
    z = 0j
    for _ in range(n):
        z = z * z + c
    return z


def orbit_points(c: complex, z: complex, k: int) -> list[complex]:
    pts = [z]
    for _ in range(k - 1):
        z = z * z + c
        pts.append(z)
    return pts


def multiplier(c: complex, z: complex, k: int) -> complex:
    """(f^k)'(z) = 2^k prod_{j<k} f^j(z)."""
    lam = 1 + 0j
    for _ in range(k):
        lam *= 2 * z
        z = z * z + c
    return lam


def _newton_periodic(c: complex, z: complex, k: int, steps: int = 60) -> tuple[complex, float]:
    """Refine a root of f^k(z) - z; returns (root, residual)."""
    for _ in range(steps):
        w, dw = z, 1 + 0j
        for _ in range(k):
            dw = 2 * w * dw
            w = w * w + c
        den = dw - 1
        if den == 0 or not cmath.isfinite(w):
            break
        step = (w - z) / den
        z -= step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    w = z
    for _ in range(k):
        w = w * w + c
    return z, abs(w - z)


# -- simultaneous root finding ------------------------------------------------


def _ratio_periodic(c: complex, n: int) -> Callable[[np.ndarray], np.ndarray]:
    """P/P' for P(z) = f^n(z) - z, safe against overflow for large |z|."""

    def ratio(z: np.ndarray) -> np.ndarray:
        w = z.copy()
        dw = np.ones_like(z)
        out = np.empty_like(z)
        live = np.ones(z.shape, dtype=bool)
        for k in range(n):
            dw[live] = 2 * w[live] * dw[live]
            w[live] = w[live] * w[live] + c
            big = live & (np.abs(w) > _HUGE)
            if big.any():
                # f^n ~ w^(2^j), (f^n)' ~ 2^j w^(2^j - 1) dw after j more steps
                out[big] = w[big] / (dw[big] * 2.0 ** (n - 1 - k))
                live &= ~big
        out[live] = (w[live] - z[live]) / (dw[live] - 1)
        return out

    return ratio


def _ratio_centers(n: int) -> Callable[[np.ndarray], np.ndarray]:
    """G/G' for G(c) = f_c^n(0), a polynomial of degree 2^(n-1) in c."""

    def ratio(c: np.ndarray) -> np.ndarray:
        w = c.copy()
        dw = np.ones_like(c)
        out = np.empty_like(c)
        live = np.ones(c.shape, dtype=bool)
        for k in range(1, n):
            dw[live] = 2 * w[live] * dw[live] + 1
            w[live] = w[live] * w[live] + c[live]
            big = live & (np.abs(w) > _HUGE)
            if big.any():
                out[big] = w[big] / (dw[big] * 2.0 ** (n - 1 - k))
                live &= ~big
        out[live] = w[live] / dw[live]
        return out

    return ratio


def aberth(ratio, degree: int, radius: float, *, max_iter: int = 800, tol: float = 1e-15, chunk: int = 512) -> np.ndarray:
    """All roots of a polynomial given only z -> P(z)/P'(z)."""
    k = np.arange(degree)
    z = radius * np.exp(1j * (2 * np.pi * k / degree + 0.4 / degree + 0.25))
    active = np.ones(degree, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        n_i = ratio(z[idx])
        s = np.empty(idx.size, dtype=complex)
        for lo in range(0, idx.size, chunk):
            rows = idx[lo : lo + chunk]
            diff = z[rows, None] - z[None, :]
            diff[np.arange(rows.size), rows] = 1.0
            inv = 1.0 / diff
            inv[np.arange(rows.size), rows] = 0.0
            s[lo : lo + chunk] = inv.sum(axis=1)
        step = n_i / (1 - n_i * s)
        bad = ~np.isfinite(step)
        step[bad] = 0.0
        z[idx] -= step
        done = np.abs(step) <= tol * np.maximum(1.0, np.abs(z[idx]))
        active[idx[done & ~bad]] = False
    return z


# -- cycles -------------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    period: int
    minimal_period: int
    point: complex
    points: tuple[complex, ...]
    multiplier: complex
    exact_period: bool

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "minimal_period": self.minimal_period,
            "point": [self.point.real, self.point.imag],
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "abs_multiplier": abs(self.multiplier),
            "exact_period": self.exact_period,
        }


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def _root_of_unity_order(lam: complex, limit: int) -> Optional[int]:
    if abs(abs(lam) - 1) > 1e-4:
        return None
    for q in range(2, limit + 1):
        if abs(lam**q - 1) < 1e-4 * q:
            return q
    return None


def periodic_cycles(c: complex, n: int, tol: float | None = None) -> list[Cycle]:
    """Every cycle of z^2 + c whose period divides n, from the 2^n roots of f^n(z) - z.

    A cycle of smaller period k | n appears with ``exact_period`` False.  At
    parabolic parameters, period-n cycles that have collapsed onto a shorter
    cycle are reported as formal cycles with repeated points.
    """
    if not 1 <= n <= MAX_PERIOD:
        raise ValueError(f"period must lie in [1, {MAX_PERIOD}]")
    c = complex(c)
    tol = default_tol(n) if tol is None else tol
    radius = 0.5 + math.sqrt(0.25 + abs(c)) + 0.1
    roots = aberth(_ratio_periodic(c, n), 2**n, radius)
    loose = max(1e-4, math.sqrt(tol))
    residuals = np.array([abs(iterate_point(c, r, n) - r) for r in roots])
    if not np.all(np.isfinite(residuals)) or residuals.max() > loose:
        raise RootFindingError(f"root refinement did not converge for c={c}, n={n}", residuals.tolist())

    # minimal period of each root, polishing on the lowest factor f^k - z it solves
    polished = []
    for r in roots:
        for k in _divisors(n):
            if abs(iterate_point(c, r, k) - r) <= loose:
                p, res = _newton_periodic(c, complex(r), k)
                if res <= tol and abs(p - r) <= loose:
                    polished.append((p, k))
                    break
        else:
            p, _ = _newton_periodic(c, complex(r), n)
            polished.append((p, n))

    unused = list(range(len(polished)))
    cycles: list[Cycle] = []
    collapsed: dict[int, int] = {}  # index of a short cycle -> spare roots on it
    while unused:
        i = unused[0]
        p, k = polished[i]
        pts = orbit_points(c, p, k)
        match_tol = max(loose, 1e3 * tol)
        taken = []
        for q in pts:
            j = min((j for j in unused if j not in taken), key=lambda j: abs(polished[j][0] - q), default=None)
            if j is None or abs(polished[j][0] - q) > match_tol:
                break
            taken.append(j)
        if len(taken) < k:
            taken = [i]
        for j in taken:
            unused.remove(j)
        owner = next(
            (ci for ci, cy in enumerate(cycles) if cy.minimal_period == k and min(abs(x - p) for x in cy.points) <= match_tol),
            None,
        )
        if owner is not None:
            collapsed[owner] = collapsed.get(owner, 0) + len(taken)
            continue
        cycles.append(Cycle(k, k, p, tuple(pts), multiplier(c, p, k), k == n))

    for ci, spare in sorted(collapsed.items()):
        base = cycles[ci]
        k = base.minimal_period
        q = _root_of_unity_order(base.multiplier, n // k) or n // k
        if (n // k) % q:
            q = n // k
        for _ in range(spare // (k * q)):
            pts = base.points * q
            cycles.append(Cycle(k * q, k, base.point, pts, base.multiplier**q, False))
    return cycles


def iterate_point(c: complex, z: complex, k: int) -> complex:
    for _ in range(k):
        z = z * z + c
    return z


def hyperbolic_centers(n: int, *, exact: bool = True) -> list[complex]:
    """Parameters where 0 is periodic with period dividing n (exactly n if ``exact``)."""
    if not 1 <= n <= MAX_PERIOD:
        raise ValueError(f"period must lie in [1, {MAX_PERIOD}]")
    if n == 1:
        return [0j]
    roots = aberth(_ratio_centers(n), 2 ** (n - 1), 2.2)
    out = []
    for c0 in roots:
        c0 = complex(c0)
        for _ in range(40):
            w, dw = c0, 1 + 0j
            for _ in range(n - 1):
                dw = 2 * w * dw + 1
                w = w * w + c0
            if dw == 0:
                break
            step = w / dw
            c0 -= step
            if abs(step) < 1e-16:
                break
        if exact and any(abs(iterate_critical(c0, k)) < 1e-8 for k in _divisors(n)[:-1]):
            continue
        out.append(c0)
    return out


def hyperbolic_parameter(n: int, lam: complex, center: complex, steps: int = 16) -> tuple[complex, complex]:
    """(c, alpha) with alpha of exact period n and multiplier lam, continued from a center."""
    z, c = 0j, complex(center)
    for t in np.linspace(0.0, 1.0, steps + 1)[1:]:
        target = t * lam
        for _ in range(50):
            u, uz, uc, uzz, uzc = z, 1 + 0j, 0j, 0j, 0j
            for _ in range(n):
                uzz, uzc = 2 * (uz * uz + u * uzz), 2 * (uc * uz + u * uzc)
                uz, uc = 2 * u * uz, 2 * u * uc + 1
                u = u * u + c
            f1, f2 = u - z, uz - target
            a11, a12, a21, a22 = uz - 1, uc, uzz, uzc
            det = a11 * a22 - a12 * a21
            if det == 0:
                raise RootFindingError("singular continuation step")
            dz = (f1 * a22 - a12 * f2) / det
            dc = (a11 * f2 - a21 * f1) / det
            z, c = z - dz, c - dc
            if abs(dz) + abs(dc) < 1e-15:
                break
    return c, z


# -- the attracting regions ---------------------------------------------------


def contraction_radii(rho: float, j_max: int) -> list[float]:
    """E_1..E_jmax with |f^(jn)(0) - alpha| <= E_j whenever c is in D(n, rho).

    In the Riemann map of the immediate basin, f^n becomes
    w -> lambda w (r - w)/(1 - r w) with r = |multiplier| <= rho, and the
    critical point sits at p = (1 - sqrt(1 - r^2))/r.  Its orbit satisfies
    |w_1| <= q_1 = p(r - p)/(1 - r p), |w_{j+1}| <= q_j (r + q_j)/(1 - r q_j),
    and Koebe distortion with |alpha| <= 2 bounds the distances by
    E_j = 2 (1 + p)^2 (q_j / p) / (1 - q_j)^2.  All of this increases with r,
    so rho may stand in for it.
    """
    if rho <= 0:
        return [0.0] * j_max
    p = rho / (1 + math.sqrt(1 - rho * rho))
    q = p * (rho - p) / (1 - rho * p)
    out = []
    for _ in range(j_max):
        ratio = (rho - p) / (1 - rho * p) if not out else q / p
        out.append(2 * (1 + p) ** 2 * ratio / (1 - q) ** 2)
        q = q * (rho + q) / (1 - rho * q)
    return out


@dataclass(frozen=True)
class OrbitAnalysis:
    kind: str  # "escape", "attracting" or "undetermined"
    cycle: Optional[Cycle] = None
    escape_step: Optional[int] = None


def analyze_critical_orbit(c: complex, max_period: int = MAX_PERIOD, budget: int = 20000) -> OrbitAnalysis:
    """Escape, or the attracting cycle the critical orbit converges to."""
    c = complex(c)
    z = 0j
    for step in range(1, budget + 1):
        z = z * z + c
        if abs(z) > ESCAPE_RADIUS:
            return OrbitAnalysis("escape", escape_step=step)
    for k in range(1, max_period + 1):
        alpha, res = _newton_periodic(c, z, k)
        if res > default_tol(k) or abs(alpha - z) > 1e-3:
            continue
        if any(abs(iterate_point(c, alpha, j) - alpha) <= 1e-9 for j in _divisors(k)[:-1]):
            continue
        lam = multiplier(c, alpha, k)
        if abs(lam) < 1 - 1e-6:
            # the critical orbit visits the cycle; report the point it tends to at multiples of k
            w = z
            for _ in range((-budget) % k):
                w = w * w + c
            point = min(orbit_points(c, alpha, k), key=lambda x: abs(x - w))
            return OrbitAnalysis("attracting", Cycle(k, k, point, tuple(orbit_points(c, point, k)), lam, True))
    return OrbitAnalysis("undetermined")


@dataclass(frozen=True)
class RegionVerdict:
    c: complex
    n: int
    rho: float
    in_D: Optional[bool]
    witness: Optional[Cycle] = None
    certificate: str = ""

    def to_json(self) -> dict:
        return {
            "c": [self.c.real, self.c.imag],
            "n": self.n,
            "rho": self.rho,
            "in_D": self.in_D,
            "witness": self.witness.to_json() if self.witness else None,
            "certificate": self.certificate,
        }


def _contraction_violation(c: complex, n: int, rho: float) -> Optional[str]:
    # a violation must beat the bound by more than accumulated rounding
    floor = 1e-9
    j_max = max(2, 240 // n)
    radii = contraction_radii(rho, j_max + 1)
    z = iterate_critical(c, n)
    for j in range(1, j_max + 1):
        bound = radii[j - 1] + radii[j]
        nxt = iterate_point(c, z, n)
        if not cmath.isfinite(nxt) or abs(nxt) > ESCAPE_RADIUS:
            return f"critical orbit escapes before step {(j + 1) * n}"
        if abs(nxt - z) > bound + floor:
            return f"|f^{(j + 1) * n}(0) - f^{j * n}(0)| = {abs(nxt - z):.3e} exceeds the basin contraction bound {bound:.3e}"
        z = nxt
    return None


def in_D(c: complex, n: int, rho: float, *, method: str = "orbit", analysis: OrbitAnalysis | None = None) -> RegionVerdict:
    """Is c in D(n, rho)?  ``in_D`` is None when the numerics cannot tell."""
    if not 1 <= n <= MAX_PERIOD:
        raise ValueError(f"period must lie in [1, {MAX_PERIOD}]")
    exact = _exact_verdict(c, n, rho)
    if exact is not None:
        return exact
    c = complex(c)
    if method == "roots":
        return _in_D_roots(c, n, rho)
    if method != "orbit":
        raise ValueError(f"unknown method {method!r}")
    analysis = analysis or analyze_critical_orbit(c)
    if analysis.kind == "escape":
        return RegionVerdict(c, n, rho, False, None, f"critical orbit escapes at step {analysis.escape_step}")
    if analysis.kind == "attracting":
        cy = analysis.cycle
        if cy.minimal_period != n:
            return RegionVerdict(c, n, rho, False, None, f"the unique attracting cycle has period {cy.minimal_period}")
        slack = 1e-12 * 2**n
        if abs(abs(cy.multiplier) - rho) <= slack:
            return RegionVerdict(c, n, rho, None, cy, "multiplier modulus within rounding of rho")
        inside = abs(cy.multiplier) <= rho
        return RegionVerdict(c, n, rho, inside, cy if inside else None, f"|multiplier| = {abs(cy.multiplier):.6g}")
    reason = _contraction_violation(c, n, rho)
    if reason is not None:
        return RegionVerdict(c, n, rho, False, None, reason)
    if n <= 8:
        return _in_D_roots(c, n, rho)
    return RegionVerdict(c, n, rho, None, None, "critical orbit neither converged nor violated the contraction bound")


def _exact_verdict(c, n: int, rho) -> Optional[RegionVerdict]:
    """Real rational c with n = 2: the 2-cycle multiplier is 4(c + 1), compared exactly."""
    if n != 2 or isinstance(c, complex) or not isinstance(c, (int, Fraction)):
        return None
    c = Fraction(c)
    lam = 4 * (c + 1)
    # a real 2-cycle exists only for c < -3/4, and it is attracting only on (-5/4, -3/4)
    if not -Fraction(5, 4) < c < -Fraction(3, 4):
        return None
    inside = abs(lam) <= Fraction(rho)
    z = -Fraction(1, 2)  # the 2-cycle is the pair of roots of z^2 + z + c + 1
    disc = -3 - 4 * c
    pts = (complex(float(z) + math.sqrt(disc) / 2), complex(float(z) - math.sqrt(disc) / 2))
    witness = Cycle(2, 2, pts[0], pts, complex(float(lam)), True) if inside else None
    return RegionVerdict(complex(c), n, float(rho), inside, witness, f"2-cycle multiplier 4(c+1) = {lam}")


def _in_D_roots(c: complex, n: int, rho: float) -> RegionVerdict:
    cycles = [cy for cy in periodic_cycles(c, n) if cy.exact_period and abs(cy.multiplier) <= rho]
    if not cycles:
        return RegionVerdict(c, n, rho, False, None, "no exact-period cycle with small multiplier")
    cy = min(cycles, key=lambda x: abs(x.multiplier))
    z = iterate_critical(c, 20000 - 20000 % n)
    for _ in range(4 * n):
        z = z * z + c
    if min(abs(z - x) for x in cy.points) <= 1e-6:
        point = min(cy.points, key=lambda x: abs(x - iterate_critical(c, 20000 - 20000 % n)))
        return RegionVerdict(c, n, rho, True, Cycle(n, n, point, tuple(orbit_points(c, point, n)), cy.multiplier, True), "critical orbit converges to the cycle")
    return RegionVerdict(c, n, rho, None, cy, "attracting cycle found but the critical orbit has not settled")


@dataclass(frozen=True)
class SCheck:
    c: complex
    max_period: int
    in_S: Optional[bool]
    verdicts: tuple[RegionVerdict, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "c": [self.c.real, self.c.imag],
            "max_period": self.max_period,
            "in_S_up_to_period": self.in_S,
            "verdicts": [v.to_json() for v in self.verdicts],
        }


def s_check(c: complex, max_period: int = MAX_PERIOD) -> SCheck:
    """Is c outside D(n, rho_n) for every n <= max_period?"""
    analysis = analyze_critical_orbit(complex(c), max_period)
    verdicts = tuple(in_D(c, n, rho_n(n), analysis=analysis) for n in range(1, max_period + 1))
    c = complex(c)
    if any(v.in_D for v in verdicts):
        return SCheck(c, max_period, False, verdicts)
    if any(v.in_D is None for v in verdicts):
        return SCheck(c, max_period, None, verdicts)
    return SCheck(c, max_period, True, verdicts)


# -- lower bound and distortion -------------------------------------------------


@dataclass(frozen=True)
class LowerBoundReport:
    c: complex
    n: int
    rho: float
    value: float
    bound: float
    holds: bool

    def to_json(self) -> dict:
        return {"c": [self.c.real, self.c.imag], "n": self.n, "rho": self.rho, "abs_fn0": self.value, "bound": self.bound, "holds": self.holds}


def lower_bound_check(c: complex, n: int, rho: float) -> LowerBoundReport:
    """|f_c^n(0)| >= rho / 2^(2n+2) for c outside every D(k, rho), k | n."""
    if not 0 < rho < 0.25:
        raise ValueError("rho must lie in (0, 1/4)")
    c = complex(c)
    analysis = analyze_critical_orbit(c)
    for k in _divisors(n):
        v = in_D(c, k, rho, analysis=analysis)
        if v.in_D is None:
            from .orbit import InconclusiveError

            raise InconclusiveError(f"cannot decide whether {c} lies in D({k}, {rho})")
        if v.in_D:
            raise PreconditionError(f"{c} lies in D({k}, {rho})")
    value = abs(iterate_critical(c, n))
    bound = rho / 2 ** (2 * n + 2)
    return LowerBoundReport(c, n, rho, value, bound, value >= bound)


def critical_basin_point(c: complex, n: int, budget: int = 20000) -> complex:
    """The point of the attracting n-cycle whose immediate basin holds 0."""
    z = iterate_critical(c, budget - budget % n)
    alpha, res = _newton_periodic(c, z, n)
    if res > default_tol(n):
        raise RootFindingError(f"critical orbit of {c} does not settle on a period-{n} point")
    return alpha


def de_branges_ratio(c: complex, n: int) -> float:
    """|alpha| / |f_c^n(0)| for the cycle point alpha attracting 0."""
    alpha = critical_basin_point(c, n)
    return abs(alpha) / abs(iterate_critical(c, n))


@dataclass(frozen=True)
class DistortionReport:
    rho: float
    p: float
    g_of_p: float
    series_closed_form: float
    series_sum: float
    difference_quotient_lower: float
    koebe_upper: float
    one_minus_p: float
    koebe_over_lower: float
    ratio_bound: float
    checks: dict

    def to_json(self) -> dict:
        return dict(self.__dict__)


def blaschke_distortion_check(rho: float) -> DistortionReport:
    """The scalar inequalities behind |alpha| / |f^n(0)| <= 8.

    Two expressions are reported for the tail sum
    sum_{n>=2} n p^(n-1) (1 - p^n)/(1 - p): the closed form
    p(p^4 - p^3 - 2p^2 + 3p + 2)/(1 - p^2)^2 and the exact sum.  They differ
    by a factor 1 - p; both leave the difference quotient above 1/2.
    """
    if not 0 < rho <= 0.25:
        raise ValueError("rho must lie in (0, 1/4]")
    # (1 - sqrt(1 - rho^2)) / rho without the cancellation
    p = rho / (1 + math.sqrt(1 - rho * rho))
    g_p = p * (rho - p) / (1 - rho * p)
    closed = p * (p**4 - p**3 - 2 * p**2 + 3 * p + 2) / (1 - p * p) ** 2
    exact = (1 / (1 - p) ** 2 - 1 + p - p / (1 - p * p) ** 2) / (1 - p)
    lower = 1 - max(closed, exact)
    koebe = 1 / (1 - p) ** 2
    cor = koebe / lower
    ratio = cor / (1 - p)
    checks = {
        "|g(p)| = p^2": abs(g_p - p * p) <= 1e-12,
        "0 < p < 4 - sqrt(15)": 0 < p <= 4 - math.sqrt(15) + 1e-15,
        "1 - closed form > 1/2": 1 - closed > 0.5,
        "1 - series > 1/2": 1 - exact > 0.5,
        "1/(1-p)^2 < 2": koebe < 2,
        "1 - p > 1/2": 1 - p > 0.5,
        "koebe / lower <= 4": cor <= 4,
        "ratio bound <= 8": ratio <= 8,
    }
    return DistortionReport(rho, p, g_p, closed, exact, lower, koebe, 1 - p, cor, ratio, checks)


def ca_inequality(b: int, n: int) -> InequalityReport:
    """(2^n - s_2(n)) log b < (2 omega(n) + 4n + 4 + 2^(n-1)) log 2, decided exactly.

    When it fails, n cannot be a Zsigmondy index of a parameter with
    denominator b outside the attracting regions.
    """
    if b < 2 or n < 3:
        raise ValueError("need b >= 2 and n >= 3")
    dt = divisor_terms(n, 2)
    e_b = 2**n - dt.s
    e_2 = 2 * dt.omega + 4 * n + 4 + 2 ** (n - 1)
    lhs = e_b * math.log(b)
    rhs = e_2 * math.log(2)
    # b^e_b < 2^e_2, by bit lengths unless too close to call
    approx = e_b * math.log2(b) - e_2
    holds = approx < 0 if abs(approx) > 1 else b**e_b < 2**e_2
    terms = {"s_2": dt.s, "omega": dt.omega, "exp_b": e_b, "exp_2": e_2}
    return InequalityReport(n, "CA", lhs, rhs, holds, False, terms)
