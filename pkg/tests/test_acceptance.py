"""End-to-end acceptance checks, one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the report lines
inline; they are also echoed through the terminal summary.
"""

import cmath
import json
import math
import random
import time
from fractions import Fraction

import mpmath
import pytest

from zsigdyn.bounds import canonical_height_estimate, divisor_terms, effective_M_solver, height_cauchy_steps
from zsigdyn.classifier import Consistency
from zsigdyn.divisibility import ord_profile, zsigmondy_test
from zsigdyn.mahler import ADMISSIBILITY_MARGIN, kappa, mahler_table, size_bound, standard_params
from zsigdyn.mandelbrot import (
    PreconditionError,
    analyze_critical_orbit,
    ca_inequality,
    de_branges_ratio,
    hyperbolic_centers,
    hyperbolic_parameter,
    in_D,
    lower_bound_check,
)
from zsigdyn.orbit import critical_orbit, make_parameter
from zsigdyn.regions import in_recurrent_window
from zsigdyn.sweep import SweepAborted, SweepSpec, run_sweep

import oracles

GRID = dict(b_range=(2, 40), height_max=50, n_max=12)
REPORT: list[str] = []


def report(k: int, ok: bool, detail: str, capsys) -> None:
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    REPORT.append(line)
    with capsys.disabled():
        print("\n" + line)


def grid_specs(jobs: int):
    # degree 2 runs in mandel mode so the period-12 region checks are recorded
    return [SweepSpec((2, 2), mode="mandel", jobs=jobs, **GRID), SweepSpec((3, 6), mode="verify", jobs=jobs, **GRID)]


def run_grid(jobs: int):
    records, aborted = [], None
    start = time.perf_counter()
    try:
        for spec in grid_specs(jobs):
            records.extend(run_sweep(spec))
    except SweepAborted as exc:
        aborted = exc
    return records, aborted, time.perf_counter() - start


@pytest.fixture(scope="module")
def grid():
    return run_grid(1)


def canonical(records):
    out = []
    for r in records:
        j = r.to_json()
        j.pop("timing")
        out.append(json.dumps(j, sort_keys=True))
    return out


def test_criterion_01_recurrence(capsys):
    ex1 = tuple(critical_orbit(make_parameter(-7, 4, 2), 4).numerators())
    ex2 = tuple(critical_orbit(make_parameter(-3, 2, 2), 4).numerators())
    rng = random.Random(1)
    params = []
    while len(params) < 500:
        a, b, d = rng.randint(-50, 50), rng.randint(1, 50), rng.randint(2, 4)
        if math.gcd(a, b) == 1:
            params.append(make_parameter(a, b, d))
    start = time.perf_counter()
    ours = [critical_orbit(p, 8).numerators() for p in params]
    elapsed = time.perf_counter() - start
    bad = [p for p, nums in zip(params, ours) if list(nums) != oracles.numerators(p.a, p.b, p.d, 8)]
    ok = ex1 == (-7, 21, -7, -114639) and ex2 == (-3, 3, -15, -159) and not bad and elapsed < 1.0
    report(1, ok, f"examples ok, {len(bad)} oracle disagreements over 500 parameters, {elapsed:.2f}s", capsys)
    assert ok


@pytest.mark.slow
def test_criterion_02_zsigmondy_vs_factoring(capsys):
    checked = skipped = 0
    disagreements = []
    for d in range(2, 5):
        for b in range(2, 21):
            for a in range(-20, 21):
                if math.gcd(a, b) != 1:
                    continue
                p = make_parameter(a, b, d)
                nums = oracles.numerators(a, b, d, 9)
                orbit = critical_orbit(p, 9)
                for n in range(2, 10):
                    expected = oracles.zsigmondy_by_factoring(nums, n)
                    if expected is None:
                        skipped += 1
                        continue
                    checked += 1
                    if zsigmondy_test(orbit, n, find_witness=False).in_zsigmondy != expected:
                        disagreements.append((a, b, d, n))
    ok = not disagreements and checked > 0
    report(2, ok, f"{checked} verdicts checked, {skipped} skipped as unfactorable, {len(disagreements)} disagreements", capsys)
    assert ok, disagreements[:10]


@pytest.mark.slow
def test_criterion_03_classifier_sweep(grid, capsys):
    records, aborted, elapsed = grid
    outside = [r for r in records if not in_recurrent_window(r.parameter)]
    wrong = [r for r in outside if r.computed != r.classification.predicted_set]
    ok = aborted is None and not wrong and elapsed < 600
    report(
        3,
        ok,
        f"{len(outside)} parameters outside the window, {len(wrong)} wrong, aborted={aborted is not None}, "
        f"single-threaded {elapsed:.1f}s",
        capsys,
    )
    assert ok, (aborted, [r.to_json() for r in wrong[:5]])


@pytest.mark.slow
def test_criterion_03_parallel_sweep(grid, capsys):
    records, _, serial_time = grid
    par_records, aborted, elapsed = run_grid(8)
    same = canonical(par_records) == canonical(records)
    ok = aborted is None and same and elapsed < 120
    report(3, ok, f"8 workers: {elapsed:.1f}s, identical records={same}", capsys)
    assert ok


def test_criterion_04_second_index(grid, capsys):
    records, _, _ = grid
    bad = [
        r.parameter
        for r in records
        if r.computed is not None
        and (2 in r.computed) != (r.parameter.d == 2 and r.parameter.a in (-(r.parameter.b + 1), -(r.parameter.b - 1)))
    ]
    ok = not bad and len(records) > 0
    report(4, ok, f"{len(records)} parameters, {len(bad)} exceptions", capsys)
    assert ok, bad[:10]


def entry_pattern(a: int, b: int, d: int, q: int, n_max: int = 12, depth: int = 40) -> list[int]:
    """ord_q(a_n) for n <= n_max from the recurrence reduced mod q^depth."""
    mod = q**depth
    x = a % mod
    out = []
    for n in range(1, n_max + 1):
        out.append(depth if x == 0 else oracles.valuation(x, q))
        x = (pow(x, d, mod) + a * pow(b, d**n - 1, mod)) % mod
    return out


def test_criterion_05_rigid_divisibility(capsys):
    rng = random.Random(5)
    primes = [p for p in range(2, 1001) if all(p % q for q in range(2, math.isqrt(p) + 1))]
    params = []
    while len(params) < 100:
        a, b, d = rng.randint(-50, 50), rng.randint(2, 40), rng.randint(2, 6)
        if math.gcd(a, b) == 1 and a != 0:
            params.append(make_parameter(a, b, d))
    checked, violations, package_checked = 0, [], 0
    for p in params:
        for q in primes:
            if p.b % q == 0:
                continue
            ords = entry_pattern(p.a, p.b, p.d, q)
            entry = next((n for n, e in enumerate(ords, start=1) if e), None)
            if entry is None or entry > 6:
                continue
            checked += 1
            assert max(ords) < 40
            if ords != [ords[entry - 1] if n % entry == 0 else 0 for n in range(1, 13)]:
                violations.append((p, q))
            if p.d == 2:
                prof = ord_profile(critical_orbit(p, 12), q, 12)
                package_checked += 1
                if list(prof.ords) != ords or prof.entry_index != entry:
                    violations.append((p, q, "package"))
    ok = not violations and checked > 0
    report(5, ok, f"{checked} (parameter, prime) pairs, {package_checked} also through ord_profile, {len(violations)} violations", capsys)
    assert ok, violations[:5]


def test_criterion_06_mahler_table(capsys):
    start = time.perf_counter()
    sizes = [size_bound(d) for d in (2, 4, 6, 8, 10)]
    k = kappa(6, 5, 1 / 216)
    table = mahler_table(range(2, 101, 2))
    weak = [
        (p.d, name)
        for p in table
        for name, (margin, ok) in p.checks.items()
        if not ok or (margin != 0.0 and margin < ADMISSIBILITY_MARGIN and "24/d^3" not in name)
    ]
    flagged = any("2500" in note and "15000" in note for note in standard_params(2).notes)
    elapsed = time.perf_counter() - start
    ok = sizes == [23, 12, 9, 9, 9] and k > 24 / 216 and not weak and flagged and elapsed < 1.0
    report(6, ok, f"size bounds {sizes}, kappa(6,5,1/216)={k:.4f}, weak margins {weak}, discrepancy flagged={flagged}, {elapsed:.2f}s", capsys)
    assert ok


def test_criterion_07_good_approximations(grid, capsys):
    records, _, _ = grid
    window = [r for r in records if in_recurrent_window(r.parameter)]
    bad = [
        r.parameter
        for r in window
        if len(r.checks.get("good_approx", [])) > r.checks.get("good_approx_cap", -1) or not r.checks.get("non_consecutive", False)
    ]
    ok = not bad and len(window) > 0
    most = max((len(r.checks["good_approx"]) for r in window), default=0)
    report(7, ok, f"{len(window)} window parameters, at most {most} good approximations, {len(bad)} violations", capsys)
    assert ok, bad[:10]


def test_criterion_08_canonical_height(capsys):
    orbit = critical_orbit(make_parameter(9, 2, 2), 10)
    est = canonical_height_estimate(orbit, 8)
    steps = height_cauchy_steps(orbit, 10)
    ok = est.lower > math.log(9) / 4 and all(s[-1] for s in steps)
    report(8, ok, f"level-8 enclosure [{est.lower:.6f}, {est.upper:.6f}] vs {math.log(9) / 4:.6f}, {len(steps)} Cauchy steps ok", capsys)
    assert ok


def brute_force_alive(a: int, b: int, d: int, eps: float, tau: float, n: int) -> bool:
    primes = [q for q in range(2, n + 1) if n % q == 0 and all(q % r for r in range(2, math.isqrt(q) + 1))]
    s = sum(d ** (n // q) for q in primes)
    with mpmath.workdps(60):
        lhs = (mpmath.mpf(tau) / 2 * d ** (n - 1) - mpmath.mpf(s) / d) * mpmath.log(b)
        rhs = mpmath.log(1 / mpmath.mpf(eps)) + len(primes) * mpmath.log(mpmath.mpf(abs(a)) / b)
        return lhs <= rhs


def test_criterion_09_effective_M(capsys):
    p = make_parameter(-3, 2, 2)
    M = effective_M_solver(p, 1, 0.1)
    alive = [n for n in range(2, 65) if brute_force_alive(-3, 2, 2, 1, 0.1, n)]
    tail = [n for n in range(65, 400) if brute_force_alive(-3, 2, 2, 1, 0.1, n)]
    expected = max(alive) + 1 if alive else 2
    ok = M == 9 == expected and not tail and divisor_terms(12, 2).s == 80
    report(9, ok, f"M={M}, brute force gives {expected}, surviving tail indices in [65, 400): {len(tail)}", capsys)
    assert ok


def outside_all_regions(c: complex, n: int, rho: float) -> bool:
    return all(in_D(c, k, rho).in_D is False for k in range(1, n + 1) if n % k == 0)


def test_criterion_10_mandelbrot(capsys):
    start = time.perf_counter()
    a = in_D(0, 1, 0.25).in_D is True and in_D(-1, 2, 0.25).in_D is True and in_D(Fraction(-7, 4), 3, 0.25).in_D is False

    rng = random.Random(10)
    passed, failures, skipped = 0, [], 0
    while passed + len(failures) < 200:
        c = complex(rng.uniform(-2.1, 0.6), rng.uniform(-1.3, 1.3))
        n = rng.randint(1, 8)
        try:
            r = lower_bound_check(c, n, 0.2)
        except PreconditionError:
            skipped += 1
            continue
        if r.holds and r.value >= r.bound * (1 - 1e-8):
            passed += 1
        else:
            failures.append((c, n))

    ratios = []
    for _ in range(30):
        n = rng.randint(1, 6)
        center = rng.choice(hyperbolic_centers(n))
        lam = rng.uniform(0.05, 0.9) * cmath.exp(2j * math.pi * rng.random())
        c, _ = hyperbolic_parameter(n, lam, center)
        ratios.append(de_branges_ratio(c, n))
    c_ok = max(ratios) <= 8 + 1e-8

    d_ok = (
        all(not ca_inequality(2, n).holds for n in range(7, 30))
        and not ca_inequality(13, 3).holds
        and ca_inequality(12, 3).holds
    )
    elapsed = time.perf_counter() - start
    ok = a and not failures and c_ok and d_ok and elapsed < 300
    report(
        10,
        ok,
        f"(a) {a}; (b) {passed}/200 lower bounds hold, {skipped} samples inside a region; "
        f"(c) max de Branges ratio {max(ratios):.3f}; (d) {d_ok}; {elapsed:.1f}s",
        capsys,
    )
    assert ok, failures[:5]


def test_criterion_11_period_three_endpoint(grid, capsys):
    records, _, _ = grid
    in_s = [
        r
        for r in records
        if r.parameter.d == 2 and in_recurrent_window(r.parameter) and r.checks.get("in_S_up_to_period_12")
    ]
    with_three = sorted(str(r.parameter.c) for r in in_s if 3 in r.computed)
    late = [str(r.parameter.c) for r in in_s if any(4 <= n <= 12 for n in r.computed)]
    ok = with_three == ["-7/4"] and not late and len(in_s) > 0
    report(11, ok, f"{len(in_s)} window parameters pass the S check, 3 in Z only for {with_three}, {len(late)} with n in [4,12]", capsys)
    assert ok


def test_zz_summary(capsys):
    with capsys.disabled():
        print("\n" + "\n".join(REPORT))
