"""Critical orbit of z^d + c over the rationals.

Writing c = a/b in lowest terms with b > 0, the n-th iterate of 0 is
a_n / b^(d^(n-1)) in lowest terms, where

    a_1 = a,    a_{n+1} = a_n^d + a * b^(d^n - 1).

Only the integer numerators are stored; the denominator is carried as the
exponent d^(n-1).  For indices where the numerator is too large to hold,
:class:`LazyOrbit` gives rigorous interval enclosures of the real iterates
and residues of the numerators modulo any integer.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

import gmpy2
from mpmath.ctx_iv import MPIntervalContext

from .arith import LOG2, log_abs_int

DEFAULT_MAX_BITS = 1 << 26
DEFAULT_EXACT_BITS = 1 << 15


class ParameterError(ValueError):
    pass


class FiniteOrbitError(ParameterError):
    pass


class OrbitSizeError(RuntimeError):
    """A numerator would exceed the configured bit-length guard."""


class InconclusiveError(RuntimeError):
    """Interval arithmetic could not separate the quantities being compared."""


@dataclass(frozen=True)
class Parameter:
    a: int
    b: int
    d: int

    @property
    def c(self) -> Fraction:
        return Fraction(self.a, self.b)

    @property
    def integral(self) -> bool:
        return self.b == 1

    @property
    def finite_orbit(self) -> bool:
        return self.b == 1 and _integer_orbit_is_finite(self.a, self.d)

    def __str__(self) -> str:
        c = f"{self.a}" if self.b == 1 else f"{self.a}/{self.b}"
        return f"z^{self.d} + ({c})"


def _integer_orbit_is_finite(c: int, d: int) -> bool:
    # Once |z| > |c| + 1 the orbit escapes monotonically; before that it is
    # confined to a finite set of integers, so it either repeats or escapes.
    seen = {0}
    z = 0
    while True:
        z = z**d + c
        if z in seen:
            return True
        if abs(z) > abs(c) + 1:
            return False
        seen.add(z)


def make_parameter(a: int, b: int = 1, d: int = 2, *, require_infinite: bool = False) -> Parameter:
    """Reduce a/b to lowest terms with b > 0 and validate the degree.

    >>> make_parameter(14, -8, 2)
    Parameter(a=-7, b=4, d=2)
    """
    a, b, d = int(a), int(b), int(d)
    if b == 0:
        raise ParameterError("zero denominator")
    if d < 2:
        raise ParameterError(f"degree must be >= 2, got {d}")
    if b < 0:
        a, b = -a, -b
    g = math.gcd(a, b)
    a, b = a // g, b // g
    param = Parameter(a, b, d)
    if require_infinite and param.finite_orbit:
        raise FiniteOrbitError(f"critical orbit of {param} is finite")
    return param


def parse_rational(text: str) -> tuple[int, int]:
    """Parse '-7/4', '3' or '-1.75' into a numerator/denominator pair."""
    try:
        frac = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"not a rational number: {text!r}") from exc
    return frac.numerator, frac.denominator


@dataclass(frozen=True)
class OrbitTerm:
    n: int
    numerator: int
    denom_exp: int


@dataclass(frozen=True)
class Orbit:
    parameter: Parameter
    terms: tuple[OrbitTerm, ...]

    def __len__(self) -> int:
        return len(self.terms)

    def term(self, n: int) -> OrbitTerm:
        if not 1 <= n <= len(self.terms):
            raise IndexError(f"term {n} not computed (orbit has {len(self.terms)} terms)")
        return self.terms[n - 1]

    def numerator(self, n: int) -> int:
        return self.term(n).numerator

    def numerators(self) -> list[int]:
        return [t.numerator for t in self.terms]

    def iterate(self, n: int) -> Fraction:
        """f^n(0) as an exact rational (materializes the denominator)."""
        t = self.term(n)
        return Fraction(t.numerator, self.parameter.b**t.denom_exp)


def new_orbit(param: Parameter) -> Orbit:
    return Orbit(param, (OrbitTerm(1, param.a, 1),))


def next_numerator_bits(param: Parameter, prev_bits: int, n: int) -> int:
    """Upper bound on bitlen(a_{n+1}) given bitlen(a_n)."""
    a, b, d = param.a, param.b, param.d
    return max(d * prev_bits, abs(a).bit_length() + (d**n - 1) * b.bit_length()) + 1


def extend_orbit(
    orbit: Orbit, n_target: int, *, max_bits: int = DEFAULT_MAX_BITS, check: bool = False
) -> Orbit:
    """Return an orbit holding every term up to ``n_target``.

    The existing terms are shared, never recomputed.  ``check`` re-verifies
    gcd(a_n, b) = 1 on each new term.
    """
    if n_target < 1:
        raise ValueError("n_target must be >= 1")
    if n_target <= len(orbit):
        return orbit
    param = orbit.parameter
    a, b, d = param.a, param.b, param.d
    terms = list(orbit.terms)
    cur = gmpy2.mpz(terms[-1].numerator)
    bz = gmpy2.mpz(b)
    for n in range(len(terms), n_target):
        bits = next_numerator_bits(param, cur.bit_length(), n)
        if bits > max_bits:
            raise OrbitSizeError(
                f"a_{n + 1} of {param} may need {bits} bits (guard {max_bits})"
            )
        cur = cur**d + a * bz ** (d**n - 1)
        num = int(cur)
        if check and math.gcd(num, b) != 1:
            raise AssertionError(f"gcd(a_{n + 1}, b) != 1 for {param}")
        terms.append(OrbitTerm(n + 1, num, d**n))
    return Orbit(param, tuple(terms))


def critical_orbit(param: Parameter, n: int, **kwargs) -> Orbit:
    return extend_orbit(new_orbit(param), n, **kwargs)


def log_abs_iterate(orbit: Orbit, n: int) -> float:
    """log|f^n(0)| = log|a_n| - d^(n-1) log b, without forming the denominator."""
    t = orbit.term(n)
    b = orbit.parameter.b
    log_b = math.log(b) if b > 1 else 0.0
    return log_abs_int(t.numerator) - t.denom_exp * log_b


def numerator_residues(param: Parameter, n_max: int, modulus: int) -> list[int]:
    """a_1..a_{n_max} reduced modulo ``modulus`` (values in [0, modulus))."""
    if modulus < 1:
        raise ValueError("modulus must be positive")
    a, b, d = param.a, param.b, param.d
    m = gmpy2.mpz(modulus)
    r = gmpy2.mpz(a) % m
    out = [int(r)]
    for k in range(1, n_max):
        r = (gmpy2.powmod(r, d, m) + a * gmpy2.powmod(b, d**k - 1, m)) % m
        out.append(int(r))
    return out


def _symmetric(r: int, m: int) -> int:
    return r - m if 2 * r > m else r


def recover_numerator(param: Parameter, n: int, bit_bound: int) -> int:
    """Exact a_n, given a proven bound |a_n| < 2**bit_bound."""
    m = 1 << (bit_bound + 1)
    return _symmetric(numerator_residues(param, n, m)[-1], m)


# -- rigorous enclosures --------------------------------------------------


class IterateEnclosure:
    """Interval enclosures of f^1(0), ..., f^N(0) at a fixed working precision."""

    def __init__(self, param: Parameter, n_max: int, prec: int):
        self.param = param
        self.prec = prec
        ctx = MPIntervalContext()
        ctx.prec = prec
        self.ctx = ctx
        c = ctx.mpf(param.a) / param.b
        self.log_b = ctx.log(param.b)
        z = c
        self.iterates = [z]
        for _ in range(1, n_max):
            z = z**param.d + c
            self.iterates.append(z)

    def iterate(self, n: int):
        return self.iterates[n - 1]

    def log_abs_iterate(self, n: int):
        return self.ctx.log(abs(self.iterates[n - 1]))

    def log_abs_numerator(self, n: int):
        return self.log_abs_iterate(n) + self.ctx.mpf(self.param.d ** (n - 1)) * self.log_b


class LazyOrbit:
    """Exact numerators while they are cheap, certified magnitudes beyond.

    Every question about the size of a_n or f^n(0) is answered either from
    the exact numerator (when its bit length stays under ``exact_bits``) or
    by interval arithmetic with escalating precision.  Residues of any a_n
    modulo any integer are always available.
    """

    PREC_START = 128

    def __init__(self, param: Parameter, exact_bits: int = DEFAULT_EXACT_BITS, orbit: Orbit | None = None):
        self.param = param
        self.exact_bits = exact_bits
        self._orbit = orbit if orbit is not None else new_orbit(param)
        self._exact_closed = False
        self._enclosures: dict[int, IterateEnclosure] = {}

    @property
    def orbit(self) -> Orbit:
        return self._orbit

    def exact(self, n: int) -> Optional[int]:
        """a_n when it fits under the exact budget, otherwise None."""
        while n > len(self._orbit) and not self._exact_closed:
            last = self._orbit.terms[-1]
            nxt = next_numerator_bits(self.param, abs(last.numerator).bit_length(), last.n)
            if nxt > self.exact_bits:
                self._exact_closed = True
                break
            self._orbit = extend_orbit(self._orbit, last.n + 1)
        if n <= len(self._orbit):
            return self._orbit.numerator(n)
        return None

    def bits_upper(self, n: int) -> int:
        """Cheap upper bound on bitlen(a_n) from the growth recurrence."""
        if n <= len(self._orbit):
            return abs(self._orbit.numerator(n)).bit_length()
        last = self._orbit.terms[-1]
        bits = abs(last.numerator).bit_length()
        for k in range(last.n, n):
            bits = next_numerator_bits(self.param, bits, k)
        return bits

    def enclosure(self, n: int, prec: int) -> IterateEnclosure:
        enc = self._enclosures.get(prec)
        if enc is None or len(enc.iterates) < n:
            enc = IterateEnclosure(self.param, n, prec)
            self._enclosures[prec] = enc
        return enc

    def precisions(self, n: int) -> Iterable[int]:
        cap = max(self.PREC_START, self.bits_upper(n) + 128)
        prec = self.PREC_START
        while True:
            yield min(prec, cap)
            if prec >= cap:
                return
            prec *= 4

    def certify(
        self,
        n: int,
        exact_fn: Callable[[int], bool],
        interval_fn: Callable[[IterateEnclosure], Optional[bool]],
    ) -> bool:
        """Decide a predicate about term n exactly, or by escalating intervals."""
        a_n = self.exact(n)
        if a_n is not None:
            return exact_fn(a_n)
        for prec in self.precisions(n):
            verdict = interval_fn(self.enclosure(n, prec))
            if verdict is not None:
                return verdict
        raise InconclusiveError(f"could not certify predicate at n={n} for {self.param}")

    def log_abs_numerator(self, n: int, enc: IterateEnclosure):
        """Interval for log|a_n| in ``enc``'s context, exact when a_n is known."""
        a_n = self.exact(n)
        if a_n is not None:
            return enc.ctx.log(enc.ctx.mpf(abs(a_n)))
        return enc.log_abs_numerator(n)

    def abs_iterate_below(self, n: int, num: int, den: int) -> bool:
        """Is |f^n(0)| < num/den?  (strict, certified)"""
        b, d = self.param.b, self.param.d

        def exact_fn(a_n: int) -> bool:
            return abs(a_n) * den < num * b ** (d ** (n - 1))

        def interval_fn(enc: IterateEnclosure):
            z = abs(enc.iterate(n))
            bound = enc.ctx.mpf(num) / den
            return z < bound

        return self.certify(n, exact_fn, interval_fn)


# -- orbit cache ----------------------------------------------------------

CACHE_ENV = "ZSIG_CACHE"
_CHECK_MODULUS = (1 << 61) - 1


def format_cache_record(param: Parameter, n: int, numerator: int) -> str:
    return f"{param.a}\t{param.b}\t{param.d}\t{n}\t{numerator:x}"


def parse_cache_record(line: str) -> tuple[Parameter, int, int]:
    a, b, d, n, hexnum = line.split()
    return Parameter(int(a), int(b), int(d)), int(n), int(hexnum, 16)


def read_orbit_cache(path: str | os.PathLike, param: Parameter) -> Orbit | None:
    """Longest contiguous cached prefix for ``param`` that passes a residue check.

    The cache is only an optimization: any record that disagrees with the
    recurrence modulo a 61-bit prime truncates the prefix there.
    """
    found: dict[int, int] = {}
    try:
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                try:
                    p, n, num = parse_cache_record(line)
                except ValueError:
                    continue
                if p == param:
                    found[n] = num
    except FileNotFoundError:
        return None
    n = 0
    while n + 1 in found:
        n += 1
    if n == 0:
        return None
    residues = numerator_residues(param, n, _CHECK_MODULUS)
    terms = []
    for k in range(1, n + 1):
        if found[k] % _CHECK_MODULUS != residues[k - 1]:
            break
        terms.append(OrbitTerm(k, found[k], param.d ** (k - 1)))
    return Orbit(param, tuple(terms)) if terms else None


def append_orbit_cache(path: str | os.PathLike, orbit: Orbit, start: int = 1) -> None:
    with open(path, "a") as fh:
        for t in orbit.terms[start - 1 :]:
            fh.write(format_cache_record(orbit.parameter, t.n, t.numerator) + "\n")
