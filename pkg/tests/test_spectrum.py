import logging

import pytest
from numpy.testing import assert_allclose

from core.errors import DomainError, NegativeOrderError, UnsupportedScaleError
from bouncer.continuum import NEUTRON
from bouncer.lattice import DimensionlessParams, build_hamiltonian, eigenvalues_sturm, lattice_state
from bouncer.spectrum import (PUBLISHED_LEVELS, SUSPECT_CELLS, continuum_energy, cos_expectation, density_profile,
                              gup_comparison, perturbative_shift, polymer_energy_bessel, polymer_state,
                              polymer_wavefunction, spectrum_table)


@pytest.mark.parametrize("s,n_max", [(2, 5)] + [(s, 10) for s in range(3, 11)])
def test_dual_route_agreement(s, n_max):
    p = DimensionlessParams(s)
    lattice = eigenvalues_sturm(build_hamiltonian(p, n_max), n_max)
    for n, eps in enumerate(lattice, start=1):
        assert abs(polymer_energy_bessel(p, n, seed=eps) - eps) < 1e-8


@pytest.mark.parametrize("s", range(3, 11))
def test_bessel_route_reproduces_published_rows(s):
    p = DimensionlessParams(s)
    values = [polymer_energy_bessel(p, n) for n in range(1, 11)]
    assert_allclose(values, PUBLISHED_LEVELS[s], rtol=0, atol=5e-6)


def test_s1_row_is_continuum_plus_shift():
    p = DimensionlessParams(1)
    values = [continuum_energy(p, n) + perturbative_shift(p, n) for n in range(1, 11)]
    assert_allclose(values, PUBLISHED_LEVELS[1], rtol=0, atol=1e-4)


@pytest.mark.parametrize("s,n", [(1, 1), (1, 7), (2, 6), (2, 10)])
def test_negative_order_cells(s, n):
    with pytest.raises(NegativeOrderError):
        polymer_energy_bessel(DimensionlessParams(s), n)


def test_negative_order_is_a_domain_error():
    assert issubclass(NegativeOrderError, DomainError)


def test_bessel_route_scale_limit():
    with pytest.raises(UnsupportedScaleError):
        polymer_energy_bessel(DimensionlessParams(18), 1, seed=0.003)


@pytest.mark.parametrize("s", [2, 4, 10])
def test_shift_is_negative(s):
    p = DimensionlessParams(s)
    levels = eigenvalues_sturm(build_hamiltonian(p, 5), 5)
    for n, eps in enumerate(levels, start=1):
        assert perturbative_shift(p, n) < 0
        assert eps < continuum_energy(p, n)


def test_perturbative_consistency_at_large_s():
    p = DimensionlessParams(10)
    levels = eigenvalues_sturm(build_hamiltonian(p, 3), 3)
    for n, eps in enumerate(levels, start=1):
        assert abs(eps - continuum_energy(p, n) - perturbative_shift(p, n)) < 1e-6


@pytest.fixture(scope="module")
def bessel_state():
    return polymer_wavefunction(DimensionlessParams(6), 3)


def test_bessel_state_matches_lattice_state(bessel_state):
    lat = lattice_state(DimensionlessParams(6), 3, dimension=bessel_state.dimension)
    assert bessel_state.method == "bessel"
    assert bessel_state.samples[0] == 0.0
    assert bessel_state.samples[1] > 0
    assert_allclose(bessel_state.samples, lat.samples, rtol=0, atol=1e-7)


def test_bessel_state_normalisation(bessel_state):
    assert bessel_state.norm() == pytest.approx(1.0, abs=1e-12)
    assert bessel_state.norm_check < 1e-4
    assert bessel_state.node_count() == 2


def test_bessel_state_boundary_check(caplog):
    p = DimensionlessParams(6)
    eps = polymer_energy_bessel(p, 3)
    with caplog.at_level(logging.WARNING, logger="bouncer.spectrum"):
        polymer_wavefunction(p, 3, energy=eps)
    assert "psi_0" not in caplog.text
    with caplog.at_level(logging.WARNING, logger="bouncer.spectrum"):
        state = polymer_wavefunction(p, 3, energy=eps + 1e-6)
    assert "psi_0" in caplog.text
    assert state.samples[0] == 0.0


def test_cos_expectation_identity():
    p = DimensionlessParams(4)
    for n in (1, 2, 5):
        st = lattice_state(p, n)
        expected = 1.0 - st.energy + st.mean_mu() / (2.0 * p.upsilon)
        assert cos_expectation(st) == pytest.approx(expected, abs=1e-9)


def test_polymer_state_dispatch():
    p = DimensionlessParams(5)
    assert polymer_state(p, 2).method == "lattice"
    assert polymer_state(p, 2, method="bessel").method == "bessel"
    with pytest.raises(DomainError):
        polymer_state(p, 2, method="numerov")


def test_gup_correction_has_opposite_sign():
    out = gup_comparison(1, alpha_sq=1.0e-20, l_min=1.0e-9, params=DimensionlessParams(10), ctx=NEUTRON)
    assert out.polymer_shift_joule < 0
    assert out.gup_correction_joule > 0


@pytest.fixture(scope="module")
def table():
    return spectrum_table([1, 2, 10], 10)


def test_table_layout(table):
    methods = {(c.s, c.n, c.method) for c in table.cells}
    for s in (1.0, 2.0, 10.0):
        for n in range(1, 11):
            assert (s, n, "lattice") in methods
            assert (s, n, "bessel") in methods
    assert not table.failed


def test_table_negative_order_cells_carry_perturbative_values(table):
    bessel_s1 = [c for c in table.cells if c.s == 1.0 and c.method == "bessel"]
    assert all(c.status == "negative-order" and c.value is None for c in bessel_s1)
    pert = {c.n: c for c in table.cells if c.method == "perturbative"}
    assert set(pert) >= set(range(1, 11))
    for c in table.cells:
        if c.method == "perturbative" and c.s == 1.0:
            assert c.flag == "ok"


def test_table_flags(table):
    for c in table.cells:
        if c.s == 10.0 and c.method in ("lattice", "bessel"):
            assert c.flag == "ok"
        if (int(c.s), c.n) in SUSPECT_CELLS:
            assert c.flag == "suspect"


def test_negative_order_bessel_cells_keep_suspect_flag(table):
    bessel = {(int(c.s), c.n): c for c in table.cells if c.method == "bessel"}
    for n in range(6, 11):
        assert bessel[(2, n)].status == "negative-order"
        assert bessel[(2, n)].flag == "suspect"
    assert bessel[(1, 1)].flag == "extrapolated"


def test_table_dual_route(table):
    agreement = table.dual_route_agreement()
    assert set(agreement) == {2.0, 10.0}
    assert max(agreement.values()) < 1e-8


def test_table_rows_have_method_tags(table):
    for row in table.rows():
        assert row["method"] in ("lattice", "bessel", "perturbative")


def test_table_extrapolation_beyond_published_rows():
    t = spectrum_table([20], 3)
    lattice = [c for c in t.cells if c.method == "lattice"]
    assert [c.flag for c in lattice] == ["extrapolated"] * 3
    assert all(c.value is not None for c in lattice)
    assert all(c.status == "unsupported-scale" for c in t.cells if c.method == "bessel")


def test_table_parallel_matches_serial():
    serial = spectrum_table([3, 4], 3)
    parallel = spectrum_table([3, 4], 3, workers=2)
    assert serial.rows() == parallel.rows()


def test_table_rejects_bad_input():
    with pytest.raises(DomainError):
        spectrum_table([0.5], 3)
    with pytest.raises(DomainError):
        spectrum_table([3], 0)


def test_density_profile_large_s():
    prof = density_profile(lattice_state(DimensionlessParams(10), 1), NEUTRON)
    assert prof.lattice_integral() == pytest.approx(1.0, abs=1e-10)
    assert prof.spacing == pytest.approx(NEUTRON.l0 / 10)
    assert prof.deviation() < 0.01
    assert len(prof.continuum_z) == 400


def test_density_profile_small_s_departs():
    prof = density_profile(lattice_state(DimensionlessParams(1), 1), NEUTRON)
    assert prof.deviation() > 0.05


def test_density_profile_resolution_check():
    with pytest.raises(DomainError):
        density_profile(lattice_state(DimensionlessParams(3), 1), NEUTRON, resolution=1)
