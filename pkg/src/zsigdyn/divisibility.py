"""Rigid divisibility of the numerators and the factor-free Zsigmondy test.

For a prime p not dividing b, let k(p) be the first index with p | a_k.
Then ord_p(a_n) = ord_p(a_{k(p)}) when k(p) | n and 0 otherwise.  Hence a
prime of a_n is non-primitive exactly when it divides some a_{n/q}, q a
prime factor of n, and n lies in the Zsigmondy set exactly when stripping
from |a_n| every prime shared with G = prod_q |a_{n/q}| leaves 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import gmpy2

from .arith import LOG2, TRIAL_DIVISION_BOUND, is_probable_prime, ord_p, prime_divisors, smallest_prime_factor
from .orbit import DEFAULT_EXACT_BITS, InconclusiveError, LazyOrbit, Orbit, Parameter, extend_orbit

UNIT = "unit-cofactor"
PRIME = "primitive-prime"
PROBABLE_PRIME = "probable-prime-cofactor"
COFACTOR = "composite-cofactor"
SIZE = "size-bound"

RECOVER_BITS = 1 << 22
_PRINTABLE_BITS = 256


class PrimeDividesDenominator(ValueError):
    """p | b, so p divides no numerator a_n."""


class RigidityViolation(AssertionError):
    pass


@dataclass(frozen=True)
class PrimeEntryProfile:
    p: int
    entry_index: Optional[int]
    entry_ord: int
    ords: tuple[int, ...]
    rigid: bool


@dataclass(frozen=True)
class ZsigmondyVerdict:
    n: int
    in_zsigmondy: bool
    certificate_kind: str
    witness: Optional[int] = None
    detail: str = ""

    def to_json(self, param: Parameter) -> dict:
        return {
            "a": param.a,
            "b": param.b,
            "d": param.d,
            "n": self.n,
            "in_zsigmondy": self.in_zsigmondy,
            "certificate_kind": self.certificate_kind,
            "witness": self.witness,
            "certificate": self.detail,
        }


def ord_profile(orbit: Orbit, p: int, n_max: int, *, strict: bool = True) -> PrimeEntryProfile:
    """Valuations ord_p(a_n), n <= n_max, with the entry index of p."""
    b = orbit.parameter.b
    if b % p == 0:
        raise PrimeDividesDenominator(f"{p} divides b = {b}")
    orbit = extend_orbit(orbit, n_max)
    ords = tuple(ord_p(orbit.numerator(n), p) for n in range(1, n_max + 1))
    entry = next((n for n, e in enumerate(ords, start=1) if e > 0), None)
    if entry is None:
        return PrimeEntryProfile(p, None, 0, ords, True)
    e0 = ords[entry - 1]
    rigid = all(e == (e0 if n % entry == 0 else 0) for n, e in enumerate(ords, start=1))
    if strict and not rigid:
        raise RigidityViolation(f"ord_{p} pattern {ords} of {orbit.parameter} is not rigid")
    return PrimeEntryProfile(p, entry, e0, ords, rigid)


def _strip(t: int, g: int) -> int:
    # g = gcd(t, G); dividing out g and then gcd(t, g) repeatedly removes every
    # prime of t that divides G, with full multiplicity.
    t = gmpy2.mpz(t)
    g = gmpy2.mpz(g)
    while g > 1:
        t //= g
        g = gmpy2.gcd(t, g)
    return int(t)


def _shared_detail(abs_an: int, n: int, earlier: dict[int, int]) -> str:
    if abs_an == 1:
        return f"a_{n} = ±1"
    shown = str(abs_an) if abs_an.bit_length() <= _PRINTABLE_BITS else f"|a_{n}| ({abs_an.bit_length()} bits)"
    sharing = [k for k, r in sorted(earlier.items()) if math.gcd(abs_an, r) > 1]
    if len(sharing) == 1 and earlier[sharing[0]] % abs_an == 0:
        return f"{shown} divides a_{sharing[0]}"
    return f"{shown} divides " + "*".join(f"a_{k}" for k in sharing)


def _verdict(n: int, a_n: int, earlier: dict[int, int], find_witness: bool) -> ZsigmondyVerdict:
    """Decide membership from a_n and the residues of a_{n/q} modulo |a_n|."""
    t = abs(a_n)
    g_mod = 1
    for r in earlier.values():
        g_mod = g_mod * (abs(r) % t) % t if t > 1 else 0
    g = math.gcd(t, g_mod) if t > 1 else 1
    cofactor = _strip(t, g) if t > 1 else 1
    if cofactor == 1:
        return ZsigmondyVerdict(n, True, UNIT, None, _shared_detail(t, n, earlier))
    if not find_witness:
        return ZsigmondyVerdict(
            n, False, COFACTOR, cofactor if cofactor.bit_length() <= _PRINTABLE_BITS else None,
            f"primitive cofactor of {cofactor.bit_length()} bits",
        )
    return _witness_verdict(n, cofactor)


def _witness_verdict(n: int, cofactor: int) -> ZsigmondyVerdict:
    p = smallest_prime_factor(cofactor)
    if p is not None:
        return ZsigmondyVerdict(n, False, PRIME, p, f"{p} is a primitive prime divisor of a_{n}")
    if cofactor < TRIAL_DIVISION_BOUND**2:
        return ZsigmondyVerdict(n, False, PRIME, cofactor, f"{cofactor} is a primitive prime divisor of a_{n}")
    bits = cofactor.bit_length()
    keep = cofactor if bits <= _PRINTABLE_BITS else None
    if is_probable_prime(cofactor):
        return ZsigmondyVerdict(n, False, PROBABLE_PRIME, keep, f"primitive cofactor of {bits} bits, probable prime")
    return ZsigmondyVerdict(n, False, COFACTOR, keep, f"composite primitive cofactor of {bits} bits")


def zsigmondy_test(orbit: Orbit, n: int, *, find_witness: bool = True) -> ZsigmondyVerdict:
    """Decide whether a_n has no primitive prime divisor, without factoring a_n."""
    if n < 2:
        raise ValueError("the Zsigmondy set starts at n = 2")
    orbit = extend_orbit(orbit, n)
    a_n = orbit.numerator(n)
    earlier = {n // q: orbit.numerator(n // q) for q in prime_divisors(n)}
    return _verdict(n, a_n, earlier, find_witness)


def zsigmondy_set(orbit: Orbit, n_max: int) -> tuple[int, ...]:
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    orbit = extend_orbit(orbit, n_max)
    return tuple(n for n in range(2, n_max + 1) if zsigmondy_test(orbit, n, find_witness=False).in_zsigmondy)


class ZsigmondyScanner:
    """Membership verdicts for indices whose numerators may be astronomically large.

    Terms under the exact budget go through :func:`zsigmondy_test`.  Past it,
    a certified enclosure with log|a_n| > log G settles non-membership (a
    member satisfies |a_n| <= G); otherwise |a_n| is provably small enough
    to be rebuilt from its residue, and the gcd test runs on that.
    """

    def __init__(self, param: Parameter, *, exact_bits: int = DEFAULT_EXACT_BITS, find_witness: bool = False):
        self.param = param
        self.lazy = LazyOrbit(param, exact_bits)
        self.find_witness = find_witness

    def verdict(self, n: int) -> ZsigmondyVerdict:
        if n < 2:
            raise ValueError("the Zsigmondy set starts at n = 2")
        a_n = self.lazy.exact(n)
        if a_n is not None:
            return zsigmondy_test(self.lazy.orbit, n, find_witness=self.find_witness)
        return self._large_verdict(n)

    def _large_verdict(self, n: int) -> ZsigmondyVerdict:
        lazy = self.lazy
        qs = prime_divisors(n)
        for prec in lazy.precisions(n):
            enc = lazy.enclosure(n, prec)
            log_an = lazy.log_abs_numerator(n, enc)
            log_g = sum((lazy.log_abs_numerator(n // q, enc) for q in qs), enc.ctx.mpf(0))
            if log_an > log_g:
                return ZsigmondyVerdict(
                    n, False, SIZE, None,
                    f"log|a_{n}| >= {float(log_an.a):.6g} exceeds log prod a_(n/q) <= {float(log_g.b):.6g}",
                )
            hi = float(log_an.b)
            if math.isfinite(hi) and hi / LOG2 + 2 <= RECOVER_BITS:
                return self._recovered_verdict(n, int(hi / LOG2) + 2, qs)
        raise InconclusiveError(f"membership of n={n} undecided for {self.param}")

    def _recovered_verdict(self, n: int, bit_bound: int, qs: list[int]) -> ZsigmondyVerdict:
        from .orbit import numerator_residues, recover_numerator

        a_n = recover_numerator(self.param, n, bit_bound)
        t = abs(a_n)
        earlier = {}
        for q in qs:
            k = n // q
            exact = self.lazy.exact(k)
            earlier[k] = exact if exact is not None else numerator_residues(self.param, k, t)[-1]
        return _verdict(n, a_n, earlier, self.find_witness)

    def verdicts(self, n_max: int, n_min: int = 2) -> list[ZsigmondyVerdict]:
        return [self.verdict(n) for n in range(n_min, n_max + 1)]


def scan_zsigmondy_set(param: Parameter, n_max: int, **kwargs) -> tuple[int, ...]:
    scanner = ZsigmondyScanner(param, **kwargs)
    return tuple(v.n for v in scanner.verdicts(n_max) if v.in_zsigmondy)


def divides_product(a_n: int, earlier: Iterable[int]) -> bool:
    """|a_n| divides prod |a_k| over the given earlier numerators."""
    t = abs(a_n)
    prod = 1
    for r in earlier:
        prod = prod * (abs(r) % t) % t
    return prod % t == 0
