"""Small integer helpers shared by the orbit, divisibility and bounds code."""

from __future__ import annotations

import math
from functools import lru_cache

import gmpy2

LOG2 = math.log(2.0)

TRIAL_DIVISION_BOUND = 10**6


def prime_divisors(n: int) -> list[int]:
    """Distinct primes dividing ``n`` (trial division; ``n`` is an index, so small)."""
    if n < 1:
        raise ValueError(f"prime_divisors needs n >= 1, got {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def primes_up_to(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return tuple(i for i, v in enumerate(sieve) if v)


@lru_cache(maxsize=None)
def _prime_blocks(bound: int, block: int = 512) -> tuple[tuple[int, tuple[int, ...]], ...]:
    primes = primes_up_to(bound)
    blocks = []
    for i in range(0, len(primes), block):
        chunk = primes[i : i + block]
        blocks.append((math.prod(chunk), chunk))
    return tuple(blocks)


def smallest_prime_factor(t: int, bound: int = TRIAL_DIVISION_BOUND) -> int | None:
    """Smallest prime factor of ``t`` not exceeding ``bound``, or None.

    Works block-wise with gcds against products of consecutive primes, so a
    large ``t`` is reduced once per block instead of once per prime.
    """
    t = abs(t)
    if t < 2:
        return None
    tz = gmpy2.mpz(t)
    for prod, chunk in _prime_blocks(bound):
        g = int(gmpy2.gcd(tz, prod))
        if g > 1:
            for p in chunk:
                if g % p == 0:
                    return p
    return None


def ord_p(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("ord_p(0) is infinite")
    x = gmpy2.mpz(x)
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def exact_root(x: int, m: int) -> int | None:
    """The integer m-th root of ``x >= 0`` when ``x`` is a perfect m-th power."""
    if x < 0:
        raise ValueError("exact_root expects a nonnegative integer")
    r, exact = gmpy2.iroot(gmpy2.mpz(x), m)
    return int(r) if exact else None


def log_abs_int(x: int) -> float:
    """Natural log of |x| from the bit length and leading 64 bits of ``x``.

    The truncation loses at most a relative 2**-63 of |x|, i.e. an absolute
    error near 1e-19 in the logarithm, so the float rounding dominates.
    """
    x = abs(x)
    if x == 0:
        raise ValueError("log of zero")
    shift = max(x.bit_length() - 64, 0)
    return math.log(x >> shift) + shift * LOG2


def is_probable_prime(t: int) -> bool:
    return bool(gmpy2.is_prime(gmpy2.mpz(t), 32))
