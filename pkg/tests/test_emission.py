"""Two-level emission: self-energy, spectral function, decay, bound state."""

import numpy as np
import pytest

import edgeqed as eq
from edgeqed import presets
from edgeqed.errors import DomainError, GridError
from edgeqed.units import HBAR_MEV_PS as HBAR

OMEGA0 = 1.5e6
OMEGA10 = OMEGA0 + 1.0


def params_for(gamma, v=1.0, leak=0.0):
    model = eq.calibrated_model(gamma, OMEGA10, eq.WaveguideModel(omega0=OMEGA0, v=v))
    return eq.TwoLevelParams(omega10=OMEGA10, model=model, leak_rate=leak)


@pytest.fixture(scope="module")
def weak():
    return params_for(0.27)


@pytest.fixture(scope="module")
def strong():
    return params_for(4.37)


class TestSelfEnergy:
    def test_gamma_anchor(self, weak):
        assert eq.gamma_of_omega(OMEGA0 + 1.0, weak) == pytest.approx(0.27, rel=1e-12)

    def test_gamma_below_edge_zero(self, weak):
        assert eq.gamma_of_omega(OMEGA0 - 3.0, weak) == 0.0
        assert eq.gamma_of_omega(OMEGA0, weak) == 0.0

    def test_gamma_sqrt_scaling(self, weak):
        assert eq.gamma_of_omega(OMEGA0 + 4.0, weak) == pytest.approx(
            eq.gamma_of_omega(OMEGA0 + 1.0, weak) / 2.0, rel=1e-12
        )

    def test_shift_below_edge_value(self, weak):
        # A = gamma/(2 pi) = 0.27/(2 pi); Delta(omega0 - 1) = -pi A = -0.135
        assert eq.emission.edge_strength(weak) == pytest.approx(0.27 / (2 * np.pi), rel=1e-12)
        assert eq.delta_closed_form(OMEGA0 - 1.0, weak) == pytest.approx(-0.135, rel=1e-12)

    def test_shift_above_edge_vanishes(self, weak):
        # principal value of int du/(b^2-u^2) over (0, inf) is zero
        assert eq.delta_closed_form(OMEGA0 + 0.37, weak) == 0.0

    def test_shift_zero_coupling(self):
        params = eq.TwoLevelParams(omega10=OMEGA10, model=eq.WaveguideModel(omega0=OMEGA0, v=1.0))
        assert eq.delta_closed_form(OMEGA0 - 1.0, params) == 0.0

    def test_singular_point_rejected(self, weak):
        with pytest.raises(DomainError):
            eq.delta_closed_form(OMEGA0, weak)

    def test_band_limited_approaches_infinite(self, weak):
        vals = [eq.delta_band_limited(OMEGA0 - 1.0, weak, OMEGA0 + top) for top in (1e2, 1e4, 1e6)]
        errors = [abs(v - (-0.135)) for v in vals]
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 1e-4


class TestDeltaNumeric:
    def test_matches_closed_form_both_sides(self, weak):
        cutoff = OMEGA0 + 200.0
        rng = np.random.default_rng(3)
        test_deltas = np.concatenate([-(10 ** rng.uniform(-1.5, 2, 10)), 10 ** rng.uniform(-1.5, 2, 10)])
        for dd in test_deltas:
            num = eq.delta_numeric(OMEGA0 + dd, weak, cutoff)
            ref = eq.delta_band_limited(OMEGA0 + dd, weak, cutoff)
            assert num == pytest.approx(ref, rel=1e-4)

    def test_cutoff_convergence_monotone(self, weak):
        target = eq.delta_closed_form(OMEGA0 - 1.0, weak)
        vals = [eq.delta_numeric(OMEGA0 - 1.0, weak, OMEGA0 + c) for c in (1e2, 1e4, 1e6)]
        errs = [abs(v - target) for v in vals]
        assert errs[0] > errs[1] > errs[2]

    def test_zero_coupling_zero_shift(self):
        params = eq.TwoLevelParams(omega10=OMEGA10, model=eq.WaveguideModel(omega0=OMEGA0, v=1.0))
        assert eq.delta_numeric(OMEGA0 - 1.0, params, OMEGA0 + 100.0) == 0.0

    def test_edge_proximity_refused(self, weak):
        with pytest.raises(DomainError):
            eq.delta_numeric(OMEGA0 + 1e-8, weak, OMEGA0 + 100.0)


class TestSpectralFunction:
    def test_weak_coupling_peak_and_width(self, weak):
        deltas = np.linspace(0.5, 1.5, 4001)
        u = eq.spectral_function(OMEGA0 + deltas, weak)
        peak = deltas[np.argmax(u)]
        assert peak == pytest.approx(1.0, abs=0.01)  # at omega10 (shift = 0)
        half = np.flatnonzero(u >= u.max() / 2)
        fwhm = deltas[half[-1]] - deltas[half[0]]
        assert fwhm == pytest.approx(0.27, rel=0.05)

    def test_sum_rule(self, weak, strong):
        for params in (weak, strong):
            result = eq.excited_amplitude(np.linspace(0, 5, 10), params)
            assert result.sum_rule_residual <= 1e-3

    def test_zero_below_edge(self, weak):
        assert eq.spectral_function(OMEGA0 - 1.0, weak) == 0.0


class TestBoundState:
    def test_strong_coupling_values(self, strong):
        bs = eq.bound_state(strong)
        assert bs.omega_b - OMEGA0 == pytest.approx(-1.09, abs=0.01)
        assert bs.residue == pytest.approx(0.51, abs=0.01)

    def test_residue_from_numerical_derivative(self, strong):
        # h large enough that omega_b +- h survives rounding at omega ~ 1.5e6
        bs = eq.bound_state(strong)
        h = 1e-4
        slope = (
            eq.delta_closed_form(bs.omega_b + h, strong) - eq.delta_closed_form(bs.omega_b - h, strong)
        ) / (2 * h)
        assert bs.residue == pytest.approx(1.0 / (1.0 - slope), rel=1e-4)

    def test_pole_condition(self, strong):
        bs = eq.bound_state(strong)
        residual = bs.omega_b - strong.omega10 - eq.delta_closed_form(bs.omega_b, strong)
        assert abs(residual) < 1e-9

    def test_weak_coupling_small_residue(self, weak):
        bs = eq.bound_state(weak)
        assert bs.omega_b < OMEGA0
        assert 0 < bs.residue < 0.05

    def test_residue_vanishes_with_coupling(self):
        residues = [eq.bound_state(params_for(g)).residue for g in (0.27, 0.027, 0.0027)]
        assert residues[0] > residues[1] > residues[2]

    def test_absent_for_zero_coupling(self):
        params = eq.TwoLevelParams(omega10=OMEGA10, model=eq.WaveguideModel(omega0=OMEGA0, v=1.0))
        assert eq.bound_state(params) is None


class TestExcitedAmplitude:
    def test_starts_at_one(self, weak):
        res = eq.excited_amplitude(np.linspace(0, 10, 50), weak)
        assert abs(res.u1[0]) == pytest.approx(1.0, abs=1e-3)

    def test_near_exponential_weak_coupling(self, weak):
        times = np.linspace(0, 3 * HBAR / 0.27, 300)
        res = eq.excited_amplitude(times, weak)
        # near-exponential: bounded oscillation around the flat-DOS law
        # (the edge is only ~4 gamma away; the beat envelope reaches ~0.08)
        deviation = np.abs(np.abs(res.u1) ** 2 - np.exp(-0.27 * times / HBAR))
        assert deviation.max() <= 0.12

    def test_strong_coupling_plateau(self, strong):
        window = 50 * HBAR / 4.37
        res = eq.excited_amplitude(np.linspace(0, window, 1200), strong)
        bs = eq.bound_state(strong)
        assert res.plateau == pytest.approx(bs.residue**2, abs=1e-2)

    def test_zero_coupling_stays_excited(self):
        params = eq.TwoLevelParams(omega10=OMEGA10, model=eq.WaveguideModel(omega0=OMEGA0, v=1.0))
        res = eq.excited_amplitude(np.linspace(0, 10, 20), params)
        assert np.abs(res.u1) == pytest.approx(np.ones(20), abs=1e-12)


class TestWeisskopfWigner:
    def test_t_zero(self, weak):
        assert eq.weisskopf_wigner(0.0, weak) == pytest.approx(1.0 + 0j, abs=1e-15)

    def test_magnitude_is_exponential(self, weak):
        t = np.linspace(0, 10, 50)
        gam = eq.gamma_of_omega(OMEGA10, weak)
        assert np.abs(eq.weisskopf_wigner(t, weak)) ** 2 == pytest.approx(np.exp(-gam * t / HBAR), abs=1e-12)

    def test_phase_slope(self, weak):
        dt = 1e-7
        w0, w1 = eq.weisskopf_wigner(0.0, weak), eq.weisskopf_wigner(dt, weak)
        slope = np.angle(w1 / w0) / dt
        assert slope == pytest.approx(-(OMEGA10 + 0.0) / HBAR, rel=1e-6)


class TestDirectPropagation:
    def test_cross_validation_weak(self, weak):
        model = weak.model
        kgrid = presets.emission_kgrid(model, OMEGA10, band_top_delta=80.0, t_span=6.0)
        tgrid = presets.emission_tgrid(model, OMEGA10, kgrid, t_max=6.0)
        traj = eq.propagate_two_level(weak, tgrid, kgrid)
        sample = np.unique(np.linspace(0, tgrid.n, 400).round().astype(int))
        band_top = float(np.hypot(model.omega0, model.v * kgrid.k[-1]))
        res = eq.excited_amplitude(tgrid.times[sample], weak, band_top=band_top)
        assert np.max(np.abs(np.abs(res.u1) - np.abs(traj.c1[sample]))) <= 1e-3

    def test_norm_conserved(self, weak):
        model = weak.model
        kgrid = presets.emission_kgrid(model, OMEGA10, band_top_delta=80.0, t_span=3.0)
        tgrid = presets.emission_tgrid(model, OMEGA10, kgrid, t_max=3.0)
        traj = eq.propagate_two_level(weak, tgrid, kgrid)
        assert np.max(np.abs(traj.norm_deficit)) <= 1e-6

    def test_leak_damps_plateau(self):
        leaky = params_for(4.37, leak=0.2)
        model = leaky.model
        kgrid = presets.emission_kgrid(model, OMEGA10, band_top_delta=80.0, t_span=10.0)
        tgrid = presets.emission_tgrid(model, OMEGA10, kgrid, t_max=10.0)
        traj_leak = eq.propagate_two_level(leaky, tgrid, kgrid)
        traj_free = eq.propagate_two_level(params_for(4.37), tgrid, kgrid)
        tail = tgrid.times > 6.0
        assert np.all(np.abs(traj_leak.c1[tail]) < np.abs(traj_free.c1[tail]))
        assert np.all(np.diff(traj_leak.norm_deficit) >= -1e-12)


class TestFieldSnapshot:
    @pytest.fixture(scope="class")
    def movie(self):
        params = params_for(4.37, v=eq.C_UM_PER_PS)
        model = params.model
        kgrid = presets.emission_kgrid(model, OMEGA10, band_top_delta=80.0, t_span=14.0)
        tgrid = presets.emission_tgrid(model, OMEGA10, kgrid, t_max=14.0)
        traj = eq.propagate_two_level(params, tgrid, kgrid, store_times=np.array([10.0, 12.0, 14.0]))
        return params, kgrid, traj

    def test_zero_field_gives_zero(self, movie):
        params, kgrid, traj = movie
        xg = np.linspace(-100.0, 100.0, 64)
        snaps = eq.field_snapshot(np.zeros(kgrid.n, complex), 10.0, [10.0, 12.0], xg, kgrid, params)
        assert all(np.max(np.abs(s.f)) == 0.0 for s in snaps)

    def test_alias_guard(self, movie):
        params, kgrid, traj = movie
        dx_limit = np.pi * HBAR / kgrid.k[-1]
        xg = np.arange(0.0, 100 * dx_limit, 2.5 * dx_limit)
        with pytest.raises(GridError):
            eq.field_snapshot(traj.c0_final, 10.0, [10.0], xg, kgrid, params)

    def test_photon_norm_bounded(self, movie):
        params, kgrid, traj = movie
        bs = eq.bound_state(params)
        loc = HBAR * params.model.v / np.sqrt(2 * OMEGA0 * (OMEGA0 - bs.omega_b))
        xg = np.linspace(-6 * loc, 12000.0, 2001)
        snaps = eq.snapshots_from_trajectory(traj, params, xg)
        for s in snaps:
            assert s.photon_norm <= 1.0 + 0.05

    def test_frozen_kernel_front_moves_at_group_velocity(self, movie):
        # peak tracking of the freely evolved outgoing part
        params, kgrid, traj = movie
        vg = eq.group_velocity(OMEGA10, params.model)
        bs = eq.bound_state(params)
        loc = HBAR * params.model.v / np.sqrt(2 * OMEGA0 * (OMEGA0 - bs.omega_b))
        xg = np.linspace(-6 * loc, 16000.0, 3001)
        t_eval = [14.0, 18.0, 22.0, 26.0]
        snaps = eq.field_snapshot(traj.c0_final, 14.0, t_eval, xg, kgrid, params)
        xs = []
        for s in snaps:
            sel = xg > max(5 * loc, 0.3 * vg * (s.t - 4.0))
            xs.append(xg[sel][np.argmax(np.abs(s.f[sel]) ** 2)])
        speed = np.polyfit(t_eval, xs, 1)[0]
        # strong-coupling emission is spectrally broad; the peak moves above
        # v_g(omega10) but within the band's dispersive envelope
        assert 0.8 * vg <= speed <= 2.0 * vg
