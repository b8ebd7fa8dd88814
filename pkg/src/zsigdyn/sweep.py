"""Parameter sweeps that cross-check the classifier against direct computation.

Parameters are visited in (d, b, a) order and records come back in that
order whatever the job count, so two runs differ only in timing fields.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .classifier import Classification, Consistency, VerificationReport, check_consistency, classify
from .divisibility import ZsigmondyScanner
from .mahler import good_approx_test, non_consecutive_check, standard_params
from .orbit import InconclusiveError, Parameter, make_parameter
from .regions import in_recurrent_window

MODES = ("classify", "verify", "mandel")


class SweepFailure(RuntimeError):
    """A worker raised; treated as seriously as a mismatch."""


class SweepAborted(AssertionError):
    def __init__(self, record: "SweepRecord"):
        super().__init__(f"sweep aborted on {record.parameter}: {record.evidence}")
        self.record = record


@dataclass(frozen=True)
class SweepSpec:
    d_range: tuple[int, int]
    b_range: tuple[int, int]
    height_max: int
    n_max: int = 12
    mode: str = "verify"
    jobs: int = 1
    output: Optional[str] = None

    def __post_init__(self):
        if self.d_range[0] > self.d_range[1] or self.b_range[0] > self.b_range[1]:
            raise ValueError("empty degree or denominator range")
        if self.d_range[0] < 2 or self.b_range[0] < 1:
            raise ValueError("need d >= 2 and b >= 1")
        if self.n_max < 2:
            raise ValueError("n_max must be >= 2")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass(frozen=True)
class SweepRecord:
    parameter: Parameter
    classification: Classification
    computed: Optional[tuple[int, ...]]
    consistency: Consistency
    evidence: str = ""
    checks: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        p = self.parameter
        return {
            "a": p.a,
            "b": p.b,
            "d": p.d,
            "classification": self.classification.to_json(),
            "computed": list(self.computed) if self.computed is not None else None,
            "status": self.consistency.value,
            "evidence": self.evidence,
            "checks": self.checks,
            "timing": {"seconds": round(self.seconds, 6)},
        }


def sweep_parameters(spec: SweepSpec) -> Iterator[Parameter]:
    h = spec.height_max
    for d in range(spec.d_range[0], spec.d_range[1] + 1):
        for b in range(spec.b_range[0], min(spec.b_range[1], h) + 1):
            for a in range(-h, h + 1):
                if math.gcd(a, b) == 1:
                    yield make_parameter(a, b, d)


def _window_checks(p: Parameter, scanner: ZsigmondyScanner, n_max: int) -> tuple[dict, list[str]]:
    """Good-approximation scarcity and the no-two-consecutive-small-iterates rule."""
    mp = standard_params(p.d)
    lo = 2 * mp.m + 6
    good = [n for n in range(lo, n_max + 1) if good_approx_test(scanner.lazy, n, mp.m)]
    spaced = non_consecutive_check(scanner.lazy, n_max)
    checks = {"good_approx": good, "good_approx_cap": mp.N, "non_consecutive": spaced}
    problems = []
    if len(good) > mp.N:
        problems.append(f"{len(good)} good approximations past index {lo} exceed {mp.N}")
    if not spaced:
        problems.append("two consecutive iterates below 1/2")
    return checks, problems


def _s_checks(p: Parameter, computed: tuple[int, ...]) -> tuple[dict, list[str]]:
    from .mandelbrot import s_check

    s = s_check(p.c)
    checks = {"in_S_up_to_period_12": s.in_S}
    problems = []
    if s.in_S:
        allowed = {3} if p.c == Fraction(-7, 4) else set()
        extra = sorted(n for n in computed if n >= 3 and n not in allowed)
        if extra:
            problems.append(f"indices {extra} in the set although c lies in S")
    return checks, problems


def evaluate_parameter(p: Parameter, n_max: int, mode: str) -> SweepRecord:
    start = time.perf_counter()
    cls = classify(p)
    if mode == "classify":
        return SweepRecord(p, cls, None, Consistency.BOUND_ONLY, "not computed", {}, time.perf_counter() - start)
    if p.finite_orbit:
        return SweepRecord(p, cls, (), Consistency.BOUND_ONLY, "finite critical orbit", {}, time.perf_counter() - start)

    scanner = ZsigmondyScanner(p)
    computed = tuple(v.n for v in scanner.verdicts(n_max) if v.in_zsigmondy)
    report: VerificationReport = check_consistency(p, cls, computed, n_max)
    status, evidence = report.status, report.evidence
    checks: dict = {}
    problems: list[str] = []
    if p.d % 2 == 0 and in_recurrent_window(p):
        c, pr = _window_checks(p, scanner, n_max)
        checks.update(c)
        problems += pr
        if mode == "mandel" and p.d == 2:
            c, pr = _s_checks(p, computed)
            checks.update(c)
            problems += pr
    if problems:
        status = Consistency.MISMATCH
        evidence = "; ".join(filter(None, [evidence, *problems]))
    return SweepRecord(p, cls, computed, status, evidence, checks, time.perf_counter() - start)


def _worker(job: tuple[Parameter, int, str]):
    p, n_max, mode = job
    try:
        return evaluate_parameter(p, n_max, mode)
    except InconclusiveError as exc:
        return ("inconclusive", str(p), str(exc))
    except Exception as exc:  # surfaced in the parent as a sweep failure
        return ("error", str(p), f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec) -> Iterator[SweepRecord]:
    """Yield one record per parameter; a mismatch is yielded and then raised."""
    jobs = ((p, spec.n_max, spec.mode) for p in sweep_parameters(spec))
    if spec.jobs == 1:
        results: Iterable = map(_worker, jobs)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=spec.jobs)
        results = pool.map(_worker, jobs, chunksize=8)
    try:
        for res in results:
            if isinstance(res, tuple):
                kind, param, msg = res
                if kind == "inconclusive":
                    raise InconclusiveError(f"{param}: {msg}")
                raise SweepFailure(f"{param}: {msg}")
            yield res
            if res.consistency is Consistency.MISMATCH:
                raise SweepAborted(res)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def summarize(records: Iterable[SweepRecord]) -> dict:
    counts = {s.value: 0 for s in Consistency}
    tags: dict[str, int] = {}
    total = 0
    seconds = 0.0
    for r in records:
        total += 1
        counts[r.consistency.value] += 1
        tag = r.classification.case_tag.value
        tags[tag] = tags.get(tag, 0) + 1
        seconds += r.seconds
    return {"records": total, "status": counts, "case_tags": dict(sorted(tags.items())), "seconds": round(seconds, 3)}
