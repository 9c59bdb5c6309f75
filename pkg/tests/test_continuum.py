import numpy as np
import pytest

from core.errors import DomainError
from bouncer.continuum import (NEUTRON, PEV, PhysicalContext, continuum_limit_residual, continuum_state,
                               qb_energy, qb_matrix_quadrature, qb_matrix_z, qb_matrix_z2, qb_wavefunction,
                               transition_region_bessel)
from bouncer.lattice import DimensionlessParams
from bouncer.specfun import airy_zero, bessel_j
from bouncer.spectrum import continuum_energy

PAIRS = [(k, n) for k in range(1, 6) for n in range(1, 6) if k != n]


def test_gravitational_length():
    assert NEUTRON.l0 == pytest.approx(5.869e-6, rel=1e-3)


def test_ground_state_energy():
    e1 = qb_energy(1, NEUTRON)
    assert e1.pev == pytest.approx(1.407, rel=2e-3)
    assert e1.joule == pytest.approx(e1.pev * PEV)


def test_lattice_units_convert_to_bouncer_energies():
    p = DimensionlessParams(7)
    for n in (1, 4):
        assert continuum_energy(p, n) * NEUTRON.energy_unit(p) == pytest.approx(qb_energy(n).joule, rel=1e-12)


def test_context_validation():
    with pytest.raises(DomainError):
        PhysicalContext(mass=-1.0, gravity=9.8, hbar=1e-34, planck_mass=2e-8)
    with pytest.raises(DomainError):
        NEUTRON.with_gravity_factor(0.0)


def test_gravity_factor_rescales_length():
    scaled = NEUTRON.with_gravity_factor(8.0)
    assert scaled.l0 == pytest.approx(NEUTRON.l0 / 2.0, rel=1e-12)
    assert scaled.gravity == pytest.approx(8.0 * NEUTRON.gravity)


def test_from_config(default_cfg):
    ctx = PhysicalContext.from_config(default_cfg.PHYSICS)
    assert ctx == NEUTRON


def test_pev_round_trip():
    assert PhysicalContext.from_pev(PhysicalContext.to_pev(3.0e-31)) == pytest.approx(3.0e-31)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_normalisation(n):
    assert continuum_state(n, NEUTRON).normalization_check() == pytest.approx(1.0, abs=1e-8)


def test_wavefunction_boundary():
    st = continuum_state(2, NEUTRON)
    assert st.wavefunction(-1e-6) == 0.0
    assert abs(st.wavefunction(0.0)) < 1e-10 * st.peak_amplitude()
    z = np.array([-1e-6, 0.0, 1e-6, 5e-6])
    values = qb_wavefunction(2, NEUTRON, z)
    assert values.shape == (4,)
    assert values[0] == 0.0


@pytest.mark.parametrize("k,n", PAIRS)
def test_z_closed_form_matches_quadrature(k, n):
    closed = qb_matrix_z(k, n, NEUTRON)
    quad = qb_matrix_quadrature(k, n, NEUTRON, 1)
    assert closed == pytest.approx(quad, rel=1e-6)


@pytest.mark.parametrize("k,n", PAIRS)
def test_z2_closed_form_matches_quadrature(k, n):
    closed = qb_matrix_z2(k, n, NEUTRON)
    quad = qb_matrix_quadrature(k, n, NEUTRON, 2)
    assert closed == pytest.approx(quad, rel=1e-6)


def test_z_sign_and_symmetry():
    assert qb_matrix_z(1, 2, NEUTRON) > 0
    assert qb_matrix_z(1, 3, NEUTRON) < 0
    assert qb_matrix_z(2, 4, NEUTRON) == qb_matrix_z(4, 2, NEUTRON)


@pytest.mark.parametrize("n", [1, 3])
def test_diagonal_moments(n):
    a = abs(airy_zero(n))
    assert qb_matrix_z(n, n, NEUTRON) == pytest.approx(2.0 / 3.0 * a * NEUTRON.l0, rel=1e-8)
    assert qb_matrix_z2(n, n, NEUTRON) == pytest.approx(8.0 / 15.0 * a ** 2 * NEUTRON.l0 ** 2, rel=1e-8)


def test_quadrature_rejects_negative_power():
    with pytest.raises(DomainError):
        qb_matrix_quadrature(1, 2, NEUTRON, -1)


def test_continuum_limit_at_large_s():
    assert continuum_limit_residual(DimensionlessParams(10), 1, NEUTRON) < 0.01
    assert continuum_limit_residual(DimensionlessParams(10), 2, NEUTRON) < 0.02


def test_continuum_limit_improves_with_s():
    coarse = continuum_limit_residual(DimensionlessParams(3), 1, NEUTRON)
    fine = continuum_limit_residual(DimensionlessParams(8), 1, NEUTRON)
    assert fine < coarse


def test_transition_region_bessel():
    x = 2000.0
    for offset in (-2.0, 0.0, 2.0):
        nu = x + offset
        assert transition_region_bessel(nu, x) == pytest.approx(bessel_j(nu, x), rel=0.02)


def test_transition_region_rejects_nonpositive_argument():
    with pytest.raises(DomainError):
        transition_region_bessel(1.0, 0.0)
