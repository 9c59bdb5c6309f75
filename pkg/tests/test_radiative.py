import pytest

from core.errors import DegeneratePairError, DomainError
from bouncer.continuum import NEUTRON
from bouncer.lattice import DimensionlessParams
from bouncer.radiative import (f_coupling, fit_leading_coefficient, polymer_frequency, polymer_quadrupole,
                               polymer_rate_ratio, quad_rate_qm, quadrupole_report)
from bouncer.specfun import airy_zero

SWEEP = (10, 14, 20)


def test_qm_rate_magnitude():
    rate = quad_rate_qm(2, 1, NEUTRON)
    assert 1e-78 < rate < 1e-76
    assert quad_rate_qm(1, 2, NEUTRON) == pytest.approx(rate)


def test_qm_rate_needs_distinct_levels():
    with pytest.raises(DegeneratePairError):
        quad_rate_qm(2, 2, NEUTRON)


def test_printed_frequency_ratio():
    ratio = polymer_frequency(2, 1, DimensionlessParams(10))
    assert ratio == pytest.approx(1.00107, abs=1e-5)
    assert ratio > 1.0


def test_rebuilt_frequency_ratio():
    p = DimensionlessParams(10)
    ratio = polymer_frequency(2, 1, p, as_printed=False)
    expected = 1.0 + (airy_zero(2) + airy_zero(1)) / (60.0 * p.s ** 2)
    assert ratio == pytest.approx(expected, abs=1e-12)
    assert ratio < 1.0


def test_f_coupling():
    a1, a2 = airy_zero(1), airy_zero(2)
    d = a2 - a1
    assert f_coupling(2, 1) == pytest.approx((a1 - 6.0 / d ** 2) / (3.0 * d ** 3), rel=1e-14)
    with pytest.raises(DomainError):
        f_coupling(3, 3)


def test_quadrupole_ratio_tends_to_one():
    corrections = [abs(polymer_quadrupole(2, 1, DimensionlessParams(s)).correction) for s in (5, 10, 20)]
    assert corrections[0] > corrections[1] > corrections[2]
    assert corrections[2] < 1e-3


def test_quadrupole_truncation_insensitive():
    p = DimensionlessParams(10)
    short = polymer_quadrupole(2, 1, p, L=30)
    long = polymer_quadrupole(2, 1, p, L=60)
    assert abs(long.correction - short.correction) < 0.02 * abs(long.correction)
    assert short.last_term_share < 0.01
    assert short.truncation == 30


@pytest.mark.parametrize("kwargs", [{"L": 5}, {"power": 4}])
def test_quadrupole_rejects_bad_arguments(kwargs):
    with pytest.raises(DomainError):
        polymer_quadrupole(2, 1, DimensionlessParams(10), **kwargs)


def test_quadrupole_truncation_must_cover_levels():
    with pytest.raises(DomainError):
        polymer_quadrupole(12, 1, DimensionlessParams(10), L=10)


def test_rate_ratio_combines_frequency_and_quadrupole():
    p = DimensionlessParams(14)
    expected = polymer_frequency(2, 1, p) ** 5 * polymer_quadrupole(2, 1, p).ratio ** 2
    assert polymer_rate_ratio(2, 1, p) == pytest.approx(expected, rel=1e-14)


def test_leading_coefficient_cubic_power():
    # frequency term alone gives -5 (a_1 + a_2) / 60
    coefficient = fit_leading_coefficient(2, 1, SWEEP, power=3)
    assert coefficient == pytest.approx(0.536, abs=0.01)


def test_leading_coefficient_stable_under_truncation():
    short = fit_leading_coefficient(2, 1, SWEEP, L=30)
    long = fit_leading_coefficient(2, 1, SWEEP, L=50)
    assert abs(short - long) < 0.02


def test_leading_coefficient_quadratic_power():
    coefficient = fit_leading_coefficient(2, 1, SWEEP, power=2)
    assert coefficient == pytest.approx(1.25, rel=0.2)


def test_leading_coefficient_needs_two_points():
    with pytest.raises(DomainError):
        fit_leading_coefficient(2, 1, [10])


def test_quadrupole_report():
    report = quadrupole_report(2, 1, NEUTRON, SWEEP)
    rows = report.rows()
    assert [r["s"] for r in rows] == [10.0, 14.0, 20.0]
    assert set(report.coefficients_by_power) == {2, 3}
    assert report.coefficient == report.coefficients_by_power[3]
    assert all(r["ratio"] > 1.0 for r in rows)
    assert report.rate_qm == pytest.approx(quad_rate_qm(2, 1, NEUTRON))
