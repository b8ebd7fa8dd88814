"""Which known result pins down the Zsigmondy set of a parameter.

The branches are tried in a fixed order, so the first one that applies wins
and the tags partition parameter space.  Outside the recurrent window the
set is known exactly (empty, or {2}); inside it only a cardinality bound is
available unless the parameter is a perfect power.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .divisibility import scan_zsigmondy_set, zsigmondy_test
from .orbit import Parameter, critical_orbit
from .regions import cmp_abs_c_inner, cmp_abs_c_outer, power_triple

SIZE_BOUNDS = {2: 23, 4: 12}
SIZE_BOUND_LARGE_D = 9


class CaseTag(str, enum.Enum):
    FINITE_ORBIT = "FINITE_ORBIT"
    INTEGRAL_DH = "INTEGRAL_DH"
    BIG_C = "BIG_C"
    POSITIVE_OR_ODD = "POSITIVE_OR_ODD"
    SMALL_NEG_WINDOW = "SMALL_NEG_WINDOW"
    MID_WINDOW = "MID_WINDOW"
    RECURRENT_REDUCIBLE = "RECURRENT_REDUCIBLE"
    RECURRENT_GENERAL = "RECURRENT_GENERAL"


class Consistency(str, enum.Enum):
    CONSISTENT = "CONSISTENT"
    BOUND_ONLY = "BOUND_ONLY"
    MISMATCH = "MISMATCH"


class MismatchError(AssertionError):
    def __init__(self, report: "VerificationReport"):
        super().__init__(f"computation contradicts classification: {report.to_json()}")
        self.report = report


@dataclass(frozen=True)
class Classification:
    case_tag: CaseTag
    m_of_c: Optional[int]  # n > m_of_c is never in the set; None when no result fixes it
    predicted_set: Optional[tuple[int, ...]]
    bound: Optional[int]
    n2_member: bool
    power_triple: Optional[tuple[int, int, int]] = None

    @property
    def exact(self) -> bool:
        return self.predicted_set is not None

    def to_json(self) -> dict:
        return {
            "case_tag": self.case_tag.value,
            "M": self.m_of_c if self.m_of_c is not None else "unbounded-by-theorem",
            "predicted": list(self.predicted_set) if self.predicted_set is not None else None,
            "bound": self.bound,
            "n2_member": self.n2_member,
            "power_triple": list(self.power_triple) if self.power_triple else None,
        }


def size_bound_for_degree(d: int) -> int:
    return SIZE_BOUNDS.get(d, SIZE_BOUND_LARGE_D)


def n2_criterion(p: Parameter) -> bool:
    """2 is in the set iff d = 2 and a = -(b +- 1), for non-integral c."""
    return p.d == 2 and p.a in (-(p.b + 1), -(p.b - 1))


def _n2_direct(p: Parameter) -> bool:
    return zsigmondy_test(critical_orbit(p, 2), 2, find_witness=False).in_zsigmondy


def classify(p: Parameter) -> Classification:
    if p.finite_orbit:
        return Classification(CaseTag.FINITE_ORBIT, None, None, None, False)

    if p.integral:
        n2 = _n2_direct(p)
        return Classification(CaseTag.INTEGRAL_DH, 2, (2,) if n2 else (), None, n2)

    n2 = n2_criterion(p)
    exact = (2,) if n2 else ()
    outer = cmp_abs_c_outer(p)
    inner = cmp_abs_c_inner(p)
    # both thresholds are irrational or need b = 1, so equality is impossible here
    assert outer != 0 and inner != 0, p

    if outer > 0:
        return Classification(CaseTag.BIG_C, 2, exact, None, n2)
    if p.a > 0 or p.d % 2:
        return Classification(CaseTag.POSITIVE_OR_ODD, 2, exact, None, n2)
    if -p.a < p.b:
        return Classification(CaseTag.SMALL_NEG_WINDOW, 2, exact, None, n2)
    if inner > 0:
        return Classification(CaseTag.MID_WINDOW, 2, exact, None, n2)

    triple = power_triple(p)
    if triple is not None:
        return Classification(CaseTag.RECURRENT_REDUCIBLE, 2, exact, None, n2, triple)
    return Classification(CaseTag.RECURRENT_GENERAL, None, None, size_bound_for_degree(p.d), n2)


@dataclass(frozen=True)
class VerificationReport:
    parameter: Parameter
    classification: Classification
    n_max: int
    computed: tuple[int, ...]
    status: Consistency
    evidence: str = ""

    def to_json(self) -> dict:
        p = self.parameter
        return {
            "a": p.a,
            "b": p.b,
            "d": p.d,
            "n_max": self.n_max,
            "classification": self.classification.to_json(),
            "computed": list(self.computed),
            "status": self.status.value,
            "evidence": self.evidence,
        }


def check_consistency(
    p: Parameter, cls: Classification, computed: tuple[int, ...], n_max: int
) -> VerificationReport:
    if cls.predicted_set is not None:
        expected = tuple(n for n in cls.predicted_set if n <= n_max)
        if computed == expected:
            return VerificationReport(p, cls, n_max, computed, Consistency.CONSISTENT)
        return VerificationReport(
            p, cls, n_max, computed, Consistency.MISMATCH, f"predicted {list(expected)}, computed {list(computed)}"
        )
    if cls.bound is not None and len(computed) > cls.bound:
        return VerificationReport(
            p, cls, n_max, computed, Consistency.MISMATCH, f"{len(computed)} members exceed the bound {cls.bound}"
        )
    if (2 in computed) != cls.n2_member:
        return VerificationReport(p, cls, n_max, computed, Consistency.MISMATCH, "n = 2 membership disagrees")
    return VerificationReport(p, cls, n_max, computed, Consistency.BOUND_ONLY)


def verify_against_computation(p: Parameter, n_max: int, *, computed: tuple[int, ...] | None = None) -> VerificationReport:
    """Compare the classification with the directly computed set on [2, n_max]."""
    cls = classify(p)
    if cls.case_tag is CaseTag.FINITE_ORBIT:
        return VerificationReport(p, cls, n_max, (), Consistency.BOUND_ONLY, "finite critical orbit")
    if computed is None:
        computed = scan_zsigmondy_set(p, n_max)
    report = check_consistency(p, cls, computed, n_max)
    if report.status is Consistency.MISMATCH:
        raise MismatchError(report)
    return report
