import cmath
import math
import random
from fractions import Fraction

import pytest

from zsigdyn.mandelbrot import (
    MAX_PERIOD,
    PreconditionError,
    analyze_critical_orbit,
    blaschke_distortion_check,
    ca_inequality,
    contraction_radii,
    critical_basin_point,
    de_branges_ratio,
    hyperbolic_centers,
    hyperbolic_parameter,
    in_D,
    iterate_point,
    lower_bound_check,
    multiplier,
    parse_complex,
    periodic_cycles,
    rho_n,
    s_check,
)


def multipliers(cycles, period):
    return sorted(round(abs(c.multiplier), 9) for c in cycles if c.minimal_period == period)


def test_fixed_points_of_z_squared():
    cycles = periodic_cycles(0, 1)
    assert sorted((round(c.point.real, 12), round(abs(c.multiplier), 12)) for c in cycles) == [(0.0, 0.0), (1.0, 2.0)]


def test_fixed_point_multipliers_at_the_cusp_of_the_main_bulb():
    cycles = periodic_cycles(-0.75, 1)
    assert sorted(round(c.multiplier.real, 9) for c in cycles) == [-1.0, 3.0]


def test_superattracting_two_cycle():
    two = [c for c in periodic_cycles(-1, 2) if c.minimal_period == 2]
    assert len(two) == 1 and two[0].exact_period
    assert sorted(round(z.real, 12) for z in two[0].points) == [-1.0, 0.0]
    assert abs(two[0].multiplier) < 1e-12


def test_parabolic_two_cycle_collapses_onto_the_fixed_point():
    cycles = periodic_cycles(-0.75, 2)
    assert sum(len(c.points) for c in cycles) == 4
    formal = [c for c in cycles if c.period == 2]
    assert len(formal) == 1 and not formal[0].exact_period
    assert formal[0].multiplier == pytest.approx(1.0, abs=1e-6)


def test_region_examples():
    assert in_D(0, 1, 0.25).in_D is True
    assert in_D(-1, 2, 0.25).in_D is True
    v = in_D(-1.75, 3, 0.25)
    assert v.in_D is False and v.certificate


def test_exact_two_cycle_test_on_the_boundary_of_the_disk():
    # 4(c + 1) = -1/4 exactly
    assert in_D(Fraction(-17, 16), 2, 0.25).in_D is True
    assert in_D(Fraction(-33, 32), 2, Fraction(1, 16)).in_D is False


def test_roots_method_agrees_with_orbit_method():
    rng = random.Random(7)
    for _ in range(60):
        c = complex(rng.uniform(-2, 0.5), rng.uniform(-1.2, 1.2))
        n = rng.randint(1, 5)
        assert in_D(c, n, 0.25).in_D == in_D(c, n, 0.25, method="roots").in_D, (c, n)


def test_in_D_rejects_unknown_method_and_period():
    with pytest.raises(ValueError):
        in_D(0, 1, 0.25, method="magic")
    with pytest.raises(ValueError):
        in_D(0, MAX_PERIOD + 1, 0.25)


def test_rho_table():
    assert [rho_n(n) for n in (1, 2, 3)] == [0.25] * 3
    assert rho_n(4) == 1 / 16 and rho_n(5) == 2**-8
    assert rho_n(12) == 2.0**-1024


def test_s_check_on_window_parameters():
    assert s_check(Fraction(-7, 4)).in_S is True
    assert s_check(Fraction(-19, 10)).in_S is True
    # 4(c + 1) = -0.2, inside D(2, 1/4)
    assert s_check(Fraction(-21, 20)).in_S is False


def test_attracting_cycle_detection():
    a = analyze_critical_orbit(-0.1226 + 0.7449j)
    assert a.kind == "attracting" and a.cycle.minimal_period == 3
    assert analyze_critical_orbit(0.5).kind == "escape"


def test_lower_bound_examples():
    r = lower_bound_check(-1.75, 3, math.nextafter(0.25, 0))
    assert r.holds and r.value == pytest.approx(7 / 256) and r.bound == pytest.approx(2**-10, rel=1e-12)
    r = lower_bound_check(1j, 4, 0.2)
    assert r.holds
    r = lower_bound_check(-2, 5, 0.2)
    assert r.holds and r.value == pytest.approx(2.0)
    with pytest.raises(PreconditionError):
        lower_bound_check(-1, 2, 0.2)
    with pytest.raises(ValueError):
        lower_bound_check(-1.75, 3, 0.25)


def test_distortion_constants():
    r = blaschke_distortion_check(0.25)
    assert r.p == pytest.approx(4 - math.sqrt(15))
    assert r.series_closed_form == pytest.approx(0.30796, abs=1e-5)
    assert r.series_sum == pytest.approx(0.35277, abs=1e-5)
    assert r.series_sum * (1 - r.p) == pytest.approx(r.series_closed_form)
    assert all(r.checks.values())


def test_distortion_terms_tend_to_one_for_small_rho():
    r = blaschke_distortion_check(1e-8)
    assert r.p == pytest.approx(0, abs=1e-8)
    assert (r.difference_quotient_lower, r.koebe_upper, r.one_minus_p) == pytest.approx((1, 1, 1), abs=1e-7)


def test_contraction_radii_shrink_quickly():
    radii = contraction_radii(0.25, 30)
    assert all(x > y for x, y in zip(radii, radii[1:]))
    assert radii[-1] < 1e-15
    assert contraction_radii(0.0, 3) == [0.0, 0.0, 0.0]


@pytest.mark.parametrize("b, n, holds", [(2, 7, False), (2, 8, False), (2, 20, False), (13, 3, False), (12, 3, True), (2, 6, True)])
def test_ca_inequality(b, n, holds):
    r = ca_inequality(b, n)
    assert r.holds is holds


def test_ca_inequality_exponents():
    r = ca_inequality(2, 7)
    assert (r.terms["exp_b"], r.terms["exp_2"]) == (126, 98)
    r = ca_inequality(13, 3)
    assert r.lhs == pytest.approx(6 * math.log(13)) and r.rhs == pytest.approx(22 * math.log(2))


def test_centers_of_low_periods():
    assert hyperbolic_centers(1) == [0j]
    assert [round(c.real, 12) for c in hyperbolic_centers(2)] == [-1.0]
    three = sorted(hyperbolic_centers(3), key=lambda c: c.real)
    assert three[0].real == pytest.approx(-1.754877666, abs=1e-9)
    assert len(three) == 3
    assert len(hyperbolic_centers(4)) == 6


def test_hyperbolic_parameter_hits_requested_multiplier():
    for center in hyperbolic_centers(4):
        c, z = hyperbolic_parameter(4, 0.2 * cmath.exp(1j), center)
        assert multiplier(c, z, 4) == pytest.approx(0.2 * cmath.exp(1j), abs=1e-9)
        assert de_branges_ratio(c, 4) <= 8


def test_critical_basin_point_is_on_the_cycle():
    alpha = critical_basin_point(-1.0 + 0.01j, 2)
    assert abs(iterate_point(-1.0 + 0.01j, alpha, 2) - alpha) < 1e-12


def test_parse_complex():
    assert parse_complex("-7/4") == -1.75
    assert parse_complex("0.25+0.5i") == 0.25 + 0.5j
    assert parse_complex("i") == 1j
