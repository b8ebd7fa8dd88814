"""Exact placement of c = a/b relative to the thresholds 2^(1/(d-1)) and 2^(d/(d-1)).

All comparisons raise both sides to the power d-1 and compare integers, so
there is no rounding anywhere.
"""

from __future__ import annotations

from .arith import exact_root
from .orbit import Parameter


def _cmp(x: int, y: int) -> int:
    return (x > y) - (x < y)


def cmp_abs_c_inner(p: Parameter) -> int:
    """sign(|c| - 2^(1/(d-1)))."""
    return _cmp(abs(p.a) ** (p.d - 1), 2 * p.b ** (p.d - 1))


def cmp_abs_c_outer(p: Parameter) -> int:
    """sign(|c| - 2^(d/(d-1)))."""
    return _cmp(abs(p.a) ** (p.d - 1), 2**p.d * p.b ** (p.d - 1))


def in_recurrent_window(p: Parameter) -> bool:
    """d even and -2^(1/(d-1)) < c < -1."""
    return p.d % 2 == 0 and p.a < 0 and -p.a > p.b and cmp_abs_c_inner(p) < 0


def power_triple(p: Parameter) -> tuple[int, int, int] | None:
    """(k, l, m) with a = -k^m, b = l^m for the smallest m | d, m > 1, if any."""
    if p.a >= 0:
        return None
    for m in range(2, p.d + 1):
        if p.d % m:
            continue
        k = exact_root(-p.a, m)
        if k is None:
            continue
        l = exact_root(p.b, m)
        if l is not None:
            return k, l, m
    return None
