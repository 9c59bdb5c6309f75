import logging

import pytest

from core.errors import DomainError
from bouncer.continuum import NEUTRON, PEV
from bouncer.experiment import (DELTA_E_EXP_PEV, bound_table, granit_bound_lambda, granit_heights, height_containment,
                                shift_energy_physical)
from bouncer.lattice import DimensionlessParams


def test_heights():
    heights = dict(granit_heights(NEUTRON))
    assert heights[1] == pytest.approx(13.72, abs=0.05)
    assert heights[2] == pytest.approx(23.99, abs=0.05)


def test_height_containment_quadrature():
    checks = {c.level: c for c in height_containment(NEUTRON)}
    assert checks[1].inside
    assert not checks[2].inside
    assert checks[1].error_um == pytest.approx(1.93, abs=0.01)
    assert checks[2].error_um == pytest.approx(2.31, abs=0.01)


def test_height_containment_linear():
    checks = height_containment(NEUTRON, combine="linear")
    assert all(c.inside for c in checks)
    assert checks[1].error_um == pytest.approx(2.9)


def test_height_containment_rejects_unknown_rule():
    with pytest.raises(DomainError):
        height_containment(NEUTRON, combine="max")


def test_free_fall_bound(caplog):
    with caplog.at_level(logging.WARNING, logger="bouncer.experiment"):
        report = granit_bound_lambda(1, DELTA_E_EXP_PEV[1] * PEV, NEUTRON)
    assert report.lambda_max == pytest.approx(8.0e-6, rel=0.01)
    assert not report.perturbative
    assert "perturbative" in caplog.text
    assert report.note == ""
    assert report.delta_E_exp_pev == pytest.approx(DELTA_E_EXP_PEV[1])


def test_enhanced_gravity_bound():
    report = granit_bound_lambda(1, DELTA_E_EXP_PEV[1] * PEV, NEUTRON, g_factor=1e7)
    assert report.lambda_max == pytest.approx(1.72e-10, rel=0.01)
    assert report.perturbative
    assert report.l0 == pytest.approx(NEUTRON.l0 * 1e-7 ** (1.0 / 3.0), rel=1e-12)
    assert report.note


def test_bound_grows_with_resolution():
    a = granit_bound_lambda(1, 1e-32, NEUTRON).lambda_max
    b = granit_bound_lambda(1, 4e-32, NEUTRON).lambda_max
    assert b == pytest.approx(2 * a, rel=1e-12)


def test_bound_shrinks_with_level():
    e = DELTA_E_EXP_PEV[1] * PEV
    assert granit_bound_lambda(2, e, NEUTRON).lambda_max < granit_bound_lambda(1, e, NEUTRON).lambda_max


@pytest.mark.parametrize("kwargs", [{"delta_E_exp": 0.0}, {"delta_E_exp": 1e-32, "g_factor": 0.5}])
def test_bound_rejects_bad_input(kwargs):
    with pytest.raises(DomainError):
        granit_bound_lambda(1, ctx=NEUTRON, **kwargs)


def test_bound_is_self_consistent_free_fall():
    # lambda at the bound reproduces |Delta E_2| = Delta E_exp
    e = DELTA_E_EXP_PEV[2] * PEV
    report = granit_bound_lambda(2, e, NEUTRON)
    params = DimensionlessParams.from_length(report.lambda_max, NEUTRON.l0)
    assert params.s == pytest.approx(1.81, abs=0.01)
    shift = shift_energy_physical(params, 2, NEUTRON)
    assert shift.joule < 0
    assert abs(shift.joule) == pytest.approx(e, rel=0.01)


def test_bound_is_self_consistent_enhanced_gravity():
    e = DELTA_E_EXP_PEV[1] * PEV
    report = granit_bound_lambda(1, e, NEUTRON, g_factor=1e7)
    ctx = NEUTRON.with_gravity_factor(1e7)
    params = DimensionlessParams.from_length(report.lambda_max, ctx.l0)
    assert abs(shift_energy_physical(params, 1, ctx).joule) == pytest.approx(e, rel=0.01)


def test_shift_scales_with_lambda_squared():
    small = shift_energy_physical(DimensionlessParams(20), 1, NEUTRON).joule
    large = shift_energy_physical(DimensionlessParams(10), 1, NEUTRON).joule
    assert large / small == pytest.approx(4.0, rel=1e-12)


def test_bound_table_order():
    table = bound_table([1, 2], [DELTA_E_EXP_PEV[1], DELTA_E_EXP_PEV[2]], g_factors=(1.0, 1e7))
    assert [(r.g_factor, r.level) for r in table] == [(1.0, 1), (1.0, 2), (1e7, 1), (1e7, 2)]
    assert set(table[0].as_row()) == {"level", "delta_E_exp_peV", "g_factor", "lambda_max", "l0",
                                      "perturbative", "note"}


def test_bound_table_rejects_mismatched_lengths():
    with pytest.raises(DomainError):
        bound_table([1, 2], [0.1])
