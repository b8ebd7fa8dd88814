import pytest

from zsigdyn.divisibility import (
    COFACTOR,
    PRIME,
    SIZE,
    UNIT,
    PrimeDividesDenominator,
    RigidityViolation,
    ZsigmondyScanner,
    divides_product,
    ord_profile,
    scan_zsigmondy_set,
    zsigmondy_set,
    zsigmondy_test,
)
from zsigdyn.orbit import Orbit, OrbitTerm, critical_orbit, make_parameter

import oracles


def orbit_of(a, b, d=2, n=12):
    return critical_orbit(make_parameter(a, b, d), n)


def test_ord_profile_entry_at_first_index():
    prof = ord_profile(orbit_of(-3, 2, n=4), 3, 4)
    assert prof.entry_index == 1 and prof.ords == (1, 1, 1, 1) and prof.rigid


def test_ord_profile_entry_at_second_index():
    prof = ord_profile(orbit_of(-7, 4, n=4), 3, 4)
    assert prof.entry_index == 2 and prof.ords == (0, 1, 0, 1)


def test_ord_profile_rejects_primes_of_the_denominator():
    with pytest.raises(PrimeDividesDenominator):
        ord_profile(orbit_of(-7, 4, n=4), 2, 4)


def test_ord_profile_of_an_absent_prime():
    prof = ord_profile(orbit_of(-7, 4, n=6), 101, 6)
    assert prof.entry_index is None and prof.ords == (0,) * 6


def test_non_rigid_pattern_is_reported():
    # a made-up sequence where 5 enters at index 1 but skips index 2
    p = make_parameter(5, 2, 2)
    fake = Orbit(p, (OrbitTerm(1, 5, 1), OrbitTerm(2, 3, 2), OrbitTerm(3, 25, 4)))
    prof = ord_profile(fake, 5, 3, strict=False)
    assert prof.entry_index == 1 and not prof.rigid
    with pytest.raises(RigidityViolation):
        ord_profile(fake, 5, 3)


def test_unit_cofactor_certificate_for_the_cubic_return():
    v = zsigmondy_test(orbit_of(-7, 4, n=3), 3)
    assert v.in_zsigmondy and v.certificate_kind == UNIT and v.detail == "7 divides a_1"


def test_second_index_member_when_a_is_minus_b_minus_one():
    v = zsigmondy_test(orbit_of(-3, 2, n=2), 2)
    assert v.in_zsigmondy and v.certificate_kind == UNIT


def test_unit_numerator_counts_as_member():
    v = zsigmondy_test(orbit_of(-1, 2, n=2), 2)
    assert v.in_zsigmondy and v.detail == "a_2 = ±1"


def test_primitive_witnesses():
    v = zsigmondy_test(orbit_of(1, 2, n=3), 3)
    assert not v.in_zsigmondy and v.certificate_kind == PRIME and v.witness == 17
    v = zsigmondy_test(orbit_of(-7, 4, n=4), 4)
    assert not v.in_zsigmondy and v.witness in (53, 103)


def test_verdict_json_shape():
    p = make_parameter(-7, 4, 2)
    out = zsigmondy_test(critical_orbit(p, 3), 3).to_json(p)
    assert set(out) == {"a", "b", "d", "n", "in_zsigmondy", "certificate_kind", "witness", "certificate"}


@pytest.mark.parametrize("a, b, n_max, expected", [(-7, 4, 8, (3,)), (-3, 2, 4, (2,)), (1, 2, 10, ())])
def test_zsigmondy_sets(a, b, n_max, expected):
    assert zsigmondy_set(orbit_of(a, b, n=n_max), n_max) == expected
    assert scan_zsigmondy_set(make_parameter(a, b, 2), n_max) == expected


def test_index_one_is_excluded():
    with pytest.raises(ValueError):
        zsigmondy_test(orbit_of(-7, 4, n=3), 1)
    with pytest.raises(ValueError):
        zsigmondy_set(orbit_of(-7, 4, n=3), 1)


def test_members_divide_the_product_of_earlier_terms():
    orbit = orbit_of(-7, 4, n=8)
    assert divides_product(orbit.numerator(3), [orbit.numerator(1)])
    assert not divides_product(orbit.numerator(4), [orbit.numerator(2)])


def test_scanner_matches_exact_test_below_budget():
    p = make_parameter(-19, 10, 2)
    exact = [zsigmondy_test(critical_orbit(p, 10), n, find_witness=False).in_zsigmondy for n in range(2, 11)]
    small_budget = ZsigmondyScanner(p, exact_bits=64)
    assert [v.in_zsigmondy for v in small_budget.verdicts(10)] == exact


def test_scanner_uses_size_certificates_for_large_terms():
    v = ZsigmondyScanner(make_parameter(-7, 6, 6)).verdict(12)
    assert not v.in_zsigmondy and v.certificate_kind == SIZE


def test_scanner_with_witness_search_reports_cofactor_kind():
    v = ZsigmondyScanner(make_parameter(-19, 10, 2), find_witness=True).verdict(9)
    assert not v.in_zsigmondy and v.certificate_kind in (PRIME, COFACTOR, "probable-prime-cofactor")


def test_longer_orbit_never_changes_a_verdict():
    p = make_parameter(-13, 9, 2)
    short = critical_orbit(p, 6)
    long = critical_orbit(p, 10)
    for n in range(2, 7):
        assert zsigmondy_test(short, n).in_zsigmondy == zsigmondy_test(long, n).in_zsigmondy


def test_agrees_with_factoring_oracle_on_small_grid():
    checked = 0
    for d in (2, 3):
        for b in range(2, 7):
            for a in range(-10, 11):
                p = make_parameter(a, b, d)
                if p.b != b:
                    continue
                nums = oracles.numerators(a, b, d, 5)
                orbit = critical_orbit(p, 5)
                for n in range(2, 6):
                    want = oracles.zsigmondy_by_factoring(nums, n)
                    if want is None:
                        continue
                    assert zsigmondy_test(orbit, n, find_witness=False).in_zsigmondy == want, (a, b, d, n)
                    checked += 1
    assert checked > 300
