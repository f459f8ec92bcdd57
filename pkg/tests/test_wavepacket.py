"""Sech wavepacket construction and overlaps."""

import warnings

import numpy as np
import pytest

import edgeqed as eq
from edgeqed.errors import DomainError, GridError

OMEGA0 = 1.5e6


@pytest.fixture
def model():
    return eq.WaveguideModel(omega0=OMEGA0, v=1.0)


def make_grid(model, delta_top, n=2048):
    return eq.KGrid.for_band(model, delta_top, n)


def test_normalization_exact(model):
    grid = make_grid(model, 8.0)
    F = eq.sech_wavepacket(OMEGA0 + 2.0, 0.1, grid, model)
    assert F.norm_squared == pytest.approx(1.0, abs=1e-12)


def test_peak_at_center(model):
    grid = make_grid(model, 8.0)
    omega1 = OMEGA0 + 2.0
    F = eq.sech_wavepacket(omega1, 0.1, grid, model)
    k_peak = grid.k[np.argmax(np.abs(F.amplitudes))]
    assert abs(k_peak - eq.k_of_omega(omega1, model)) <= grid.dk

    assert np.all(F.amplitudes.real > 0)
    assert np.all(F.amplitudes.imag == 0)


def test_normalization_grid_independent(model):
    omega1, sigma0 = OMEGA0 + 2.0, 0.05
    norms = []
    for delta_top, n in ((4.0, 2048), (8.0, 4096)):
        grid = make_grid(model, delta_top, n)
        profile = 1.0 / np.cosh((eq.omega_of_k(grid.k, model) - omega1) / sigma0)
        norms.append(np.sqrt(np.sum(profile**2) * grid.dk))
    assert norms[0] == pytest.approx(norms[1], rel=1e-6)


def test_coverage_too_small_is_error(model):
    grid = make_grid(model, 2.5, 512)
    with pytest.raises(GridError):
        eq.sech_wavepacket(OMEGA0 + 2.0, 0.1, grid, model)  # only 5 sigma above


def test_coverage_warning_between_10_and_20_sigma(model):
    grid = make_grid(model, 3.5, 512)
    with pytest.warns(UserWarning):
        eq.sech_wavepacket(OMEGA0 + 2.0, 0.1, grid, model)  # 15 sigma above


def test_edge_proximity_warning(model):
    grid = make_grid(model, 3.0, 512)
    with pytest.warns(UserWarning, match="edge"):
        eq.sech_wavepacket(OMEGA0 + 0.3, 0.1, grid, model)  # 3 sigma from the edge


def test_invalid_inputs(model):
    grid = make_grid(model, 3.0, 512)
    with pytest.raises(DomainError):
        eq.sech_wavepacket(OMEGA0 + 1.0, -0.1, grid, model)
    with pytest.raises(DomainError):
        eq.sech_wavepacket(OMEGA0 - 1.0, 0.1, grid, model)


class TestOverlap:
    def test_self_overlap_is_one(self, model):
        grid = make_grid(model, 8.0)
        F = eq.sech_wavepacket(OMEGA0 + 2.0, 0.1, grid, model)
        assert abs(eq.overlap(F, F)) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_support_orthogonal(self, model):
        grid = make_grid(model, 80.0, 4096)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            a = eq.sech_wavepacket(OMEGA0 + 20.0, 0.05, grid, model)
            b = eq.sech_wavepacket(OMEGA0 + 60.0, 0.05, grid, model)
        assert abs(eq.overlap(a, b)) < 1e-9

    def test_mismatched_grids_rejected(self, model):
        a = eq.sech_wavepacket(OMEGA0 + 2.0, 0.1, make_grid(model, 8.0), model)
        b = eq.sech_wavepacket(OMEGA0 + 2.0, 0.1, make_grid(model, 8.0, 1024), model)
        with pytest.raises(GridError):
            eq.overlap(a, b)

    def test_bounded_by_one(self, model):
        grid = make_grid(model, 8.0)
        a = eq.sech_wavepacket(OMEGA0 + 2.0, 0.1, grid, model)
        b = eq.sech_wavepacket(OMEGA0 + 2.2, 0.15, grid, model)
        assert abs(eq.overlap(a, b)) <= 1.0 + 1e-9
