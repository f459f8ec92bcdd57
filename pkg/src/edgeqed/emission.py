"""Two-level atom at the continuum edge: self-energy, decay, bound polariton.

With the square-root edge DOS the self-energy has closed forms.  Writing
A = g^2 sqrt(omega0/2)/v and delta = omega - omega0:

    Gamma(omega) = 2 pi A / sqrt(delta)                     (delta > 0)
    Delta(omega) = -pi A / sqrt(-delta)                     (delta < 0)
    Delta(omega) = 0                                        (delta > 0)

for an infinite band top; with a finite band top Lambda (U = sqrt(Lambda -
omega0)) the principal value gives

    Delta(omega) = -(2A/s) arctan(U/s),        s = sqrt(-delta),  delta < 0
    Delta(omega) = (A/sqrt(delta)) ln[(U + sqrt(delta)) / |U - sqrt(delta)|]

The excited amplitude is the Fourier transform of the spectral function plus
the bound-state pole term Z e^{-i omega_b t/hbar}; amplitudes are returned in
the frame rotating at omega10 (magnitudes are frame independent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import selfenergy as _se
from .errors import DomainError, GridError, ToleranceError
from .model import KGrid, TimeGrid, WaveguideModel, detuning_of_k
from .propagate import _integrate
from .units import HBAR_MEV_PS as HBAR

#: default Green's-function frequency cutoff, in units of gamma above omega10
DEFAULT_CUTOFF_GAMMAS = 1e4
#: sum-rule residual above this raises a quadrature-resolution error
SUM_RULE_TOL = 1e-2


@dataclass(frozen=True)
class TwoLevelParams:
    """Two-level transition omega10 coupled to the waveguide with rate gamma'."""

    omega10: float
    model: WaveguideModel
    leak_rate: float = 0.0

    def __post_init__(self):
        if self.omega10 <= 0:
            raise DomainError("omega10 must be positive")
        if self.leak_rate < 0:
            raise DomainError("leak_rate must be nonnegative")


@dataclass(frozen=True)
class BoundState:
    omega_b: float
    residue: float


@dataclass
class SelfEnergyCurve:
    omega: np.ndarray
    Gamma: np.ndarray
    Delta: np.ndarray


@dataclass
class EmissionResult:
    """Excited-state amplitude U1(t) plus pole data and diagnostics."""

    times: np.ndarray
    u1: np.ndarray
    plateau: float
    bound: BoundState | None
    sum_rule_residual: float


@dataclass
class TwoLevelTrajectory:
    tgrid: TimeGrid
    kgrid: KGrid
    c1: np.ndarray
    p_photon: np.ndarray
    norm_deficit: np.ndarray
    c0_final: np.ndarray
    field_times: np.ndarray
    field: np.ndarray


@dataclass
class FieldSnapshot:
    x: np.ndarray
    f: np.ndarray
    t: float

    @property
    def photon_norm(self) -> float:
        dx = np.gradient(self.x)
        return float(np.sum(np.abs(self.f) ** 2 * dx))


def edge_strength(params: TwoLevelParams) -> float:
    """A = g^2 sqrt(omega0/2) / v, the edge self-energy scale (meV^(3/2))."""
    return _se.edge_strength(params.model)


def gamma_of_omega(omega, params: TwoLevelParams):
    """Decay rate 2 pi g^2 DOS(omega) above the edge, zero at and below it."""
    return _se.gamma_at(omega, params.model)


def delta_closed_form(omega, params: TwoLevelParams):
    """Level shift for an infinite band top; singular exactly at the edge."""
    return _se.shift_infinite(omega, params.model)


def delta_band_limited(omega, params: TwoLevelParams, band_top: float):
    """Level shift for a band truncated at `band_top` (exact PV result)."""
    return _se.shift_band_limited(omega, params.model, band_top)


def _delta_derivative_below(omega: float, params: TwoLevelParams, band_top: float | None) -> float:
    return _se.shift_derivative_below(omega, params.model, band_top)


def delta_numeric(omega: float, params: TwoLevelParams, cutoff: float) -> float:
    """Principal-value quadrature of the level shift up to `cutoff`.

    The edge singularity is removed by the substitution u = sqrt(omega'-omega0);
    for omega inside the band the pole is excised symmetrically, which cancels
    the log term exactly and leaves the regular integral of
    [Gamma(omega+s)-Gamma(omega-s)]/s.
    """
    omega0 = params.model.omega0
    if cutoff <= omega0:
        raise DomainError("cutoff must lie above the cut-off frequency")
    delta = omega - omega0
    d_cut = cutoff - omega0
    if abs(delta) < 1e-6:
        raise DomainError("omega is within a quadrature cell of the edge; refuse")

    model = params.model

    def f_of_u(u):
        # Gamma(delta' = u^2) * 2u / (2 pi (delta - u^2)); finite at u -> 0.
        # Everything stays in detuning coordinates (see gamma_at_detuning).
        return _se.gamma_at_detuning(u * u, model) * 2.0 * u / (2.0 * np.pi * (delta - u * u))

    opts = dict(epsabs=1e-14, epsrel=1e-11, limit=800)
    if delta < 0:
        val, _ = quad(f_of_u, 0.0, np.sqrt(d_cut), **opts)
        return val

    if delta >= d_cut:
        raise DomainError("omega must lie below the cutoff for the PV integral")
    h = 0.5 * min(delta, d_cut - delta)

    val1, _ = quad(f_of_u, 0.0, np.sqrt(delta - h), **opts)
    val3, _ = quad(f_of_u, np.sqrt(delta + h), np.sqrt(d_cut), **opts)

    def sym_diff(s):
        gp = _se.gamma_at_detuning(delta + s, model)
        gm = _se.gamma_at_detuning(delta - s, model)
        return (gp - gm) / s

    val2, _ = quad(sym_diff, 0.0, h, **opts)
    return val1 + val3 - val2 / (2.0 * np.pi)


def spectral_function(omega, params: TwoLevelParams, band_top: float | None = None):
    """Continuum spectral density U(omega); zero at and below the edge.

    The bound-state delta contribution is reported separately by bound_state.
    """
    omega = np.asarray(omega, dtype=float)
    omega0 = params.model.omega0
    delta = omega - omega0
    out = np.zeros_like(delta)
    above = delta > 0
    if band_top is not None:
        above &= omega < band_top
    if np.any(above):
        om = omega[above]
        gam = gamma_of_omega(om, params)
        shift = (
            delta_closed_form(om, params)
            if band_top is None
            else delta_band_limited(om, params, band_top)
        )
        out[above] = (gam / 2.0 / np.pi) / ((om - params.omega10 - shift) ** 2 + (gam / 2.0) ** 2)
    return float(out) if out.ndim == 0 else out


def self_energy_curve(
    omegas: np.ndarray, params: TwoLevelParams, band_top: float | None = None
) -> SelfEnergyCurve:
    omegas = np.asarray(omegas, dtype=float)
    gam = gamma_of_omega(omegas, params)
    if band_top is None:
        shift = delta_closed_form(omegas, params)
    else:
        shift = delta_band_limited(omegas, params, band_top)
    return SelfEnergyCurve(omegas, gam, shift)


def bound_state(params: TwoLevelParams, band_top: float | None = None) -> BoundState | None:
    """Pole of the resolvent below the edge: omega_b and residue Z.

    The edge divergence of Delta guarantees a root for any g > 0; absent only
    for g = 0.  Bracketed bisection/secant (brentq) to 1e-12 meV.
    """
    if params.model.g == 0.0:
        return None
    omega0 = params.model.omega0
    delta10 = params.omega10 - omega0

    def root_fn(x):
        # x = omega0 - omega > 0
        omega = omega0 - x
        shift = (
            delta_closed_form(omega, params)
            if band_top is None
            else delta_band_limited(omega, params, band_top)
        )
        return -x - delta10 - shift

    lo, hi = 1e-9, 1e6
    if root_fn(lo) <= 0 or root_fn(hi) >= 0:
        raise ToleranceError(f"bound-state bracket failed: f({lo})={root_fn(lo)}, f({hi})={root_fn(hi)}")
    x_b = brentq(root_fn, lo, hi, xtol=1e-12, rtol=8.9e-16, maxiter=200)
    omega_b = omega0 - x_b
    slope = _delta_derivative_below(omega_b, params, band_top)
    return BoundState(omega_b=float(omega_b), residue=float(1.0 / (1.0 - slope)))


def _frequency_mesh(
    params: TwoLevelParams, d_cut: float, t_max: float
) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-uniform Simpson mesh in u = sqrt(omega - omega0).

    Uniform u accumulates points quadratically toward the edge (the graded
    mesh); segment steps resolve the resonance width and the phase up to
    t_max, with a deliberately coarse far tail where U is negligible.
    """
    omega0 = params.model.omega0
    delta10 = params.omega10 - omega0
    gamma10 = float(gamma_of_omega(params.omega10, params))
    u_max = np.sqrt(d_cut)
    u10 = np.sqrt(max(delta10, 1e-12))
    wu = max((gamma10 / 2.0) / (2.0 * u10), 1e-6 * u10)
    t_ref = max(t_max, 1e-3)

    def phase_du(u_ref):
        return 0.15 * HBAR / (max(u_ref, 1e-9) * t_ref)

    d_resolved = max(delta10 + 50.0 * gamma10 / 2.0, 4.0 * delta10, 300.0 * min(1.0, gamma10))
    u_lo = max(0.0, u10 - 40.0 * wu)
    u_hi = min(u_max, u10 + 40.0 * wu)
    u_mid = min(u_max, np.sqrt(d_resolved))
    bounds = sorted({0.0, u_lo, u_hi, max(u_hi, u_mid), u_max})

    nodes, weights = [], []
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b - a <= 0:
            continue
        if a >= max(u_hi, u_mid) - 1e-12:
            du = max(phase_du(b), (b - a) / 4000.0)
        elif u_lo <= a < u_hi:
            du = min(wu / 6.0, phase_du(b))
        else:
            du = phase_du(b)
        n = int(np.ceil((b - a) / du))
        n = max(n + (n % 2), 2)
        seg = np.linspace(a, b, n + 1)
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w *= (b - a) / n / 3.0
        nodes.append(seg)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def excited_amplitude(
    times,
    params: TwoLevelParams,
    band_top: float | None = None,
    cutoff: float | None = None,
) -> EmissionResult:
    """U1(t): Fourier transform of the spectral function plus the pole term.

    Returned in the frame rotating at omega10.  |U1(0)| = 1 within the
    sum-rule tolerance; the plateau estimate is the mean of |U1|^2 over the
    last 20% of the window.
    """
    if isinstance(times, TimeGrid):
        times = times.times
    times = np.asarray(times, dtype=float)
    omega0 = params.model.omega0
    delta10 = params.omega10 - omega0
    if delta10 <= 0:
        raise DomainError("omega10 must lie above the edge for emission")
    if params.model.g == 0.0:
        # decoupled atom: the whole weight sits in an undamped pole at omega10
        u1 = np.ones(times.size, dtype=complex)
        return EmissionResult(times, u1, 1.0, None, 0.0)
    gamma10 = float(gamma_of_omega(params.omega10, params))
    if band_top is not None:
        d_cut = band_top - omega0
    elif cutoff is not None:
        d_cut = cutoff - omega0
    else:
        d_cut = delta10 + DEFAULT_CUTOFF_GAMMAS * gamma10

    u, w = _frequency_mesh(params, d_cut, float(times.max(initial=0.0)))
    deltas = u * u
    dens = spectral_function(omega0 + deltas, params, band_top=band_top) * 2.0 * u
    mass = float(np.sum(w * dens))

    bs = bound_state(params, band_top=band_top)
    Z = bs.residue if bs is not None else 0.0
    residual = abs(mass + Z - 1.0)
    if residual > SUM_RULE_TOL:
        raise ToleranceError(
            f"sum rule violated by {residual:.2e}: frequency quadrature unresolved"
        )

    u1 = np.empty(times.size, dtype=complex)
    coeff = w * dens
    chunk = max(1, int(4e6 // max(u.size, 1)))
    for lo in range(0, times.size, chunk):
        hi = min(lo + chunk, times.size)
        phases = np.exp(-1j * np.outer(times[lo:hi], deltas - delta10) / HBAR)
        u1[lo:hi] = phases @ coeff
    if bs is not None:
        u1 += Z * np.exp(-1j * (bs.omega_b - params.omega10) * times / HBAR)

    tail = times >= times[0] + 0.8 * (times[-1] - times[0])
    plateau = float(np.mean(np.abs(u1[tail]) ** 2))
    return EmissionResult(times, u1, plateau, bs, residual)


def weisskopf_wigner(t, params: TwoLevelParams):
    """Flat-DOS decay e^{-i(omega10+Delta)t/hbar} e^{-Gamma t/(2 hbar)}."""
    t = np.asarray(t, dtype=float)
    omega0 = params.model.omega0
    if params.omega10 > omega0:
        gam = float(gamma_of_omega(params.omega10, params))
        shift = 0.0
    else:
        gam = 0.0
        shift = float(delta_closed_form(params.omega10, params))
    out = np.exp(-1j * (params.omega10 + shift) * t / HBAR) * np.exp(-gam * t / (2.0 * HBAR))
    return complex(out) if out.ndim == 0 else out


def propagate_two_level(
    params: TwoLevelParams,
    tgrid: TimeGrid,
    kgrid: KGrid,
    store_times: np.ndarray | None = None,
) -> TwoLevelTrajectory:
    """Direct integration of the excited amplitude coupled to the k grid.

    Same method of lines as the interface propagator with no drive; the
    optional leak_rate damps the atomic amplitude.
    """
    nu = detuning_of_k(kgrid.k, params.model) - (params.omega10 - params.model.omega0)
    g_k = np.full(kgrid.n, params.model.g, dtype=complex)
    _, c1, p0, c0, ft, field = _integrate(
        tgrid=tgrid,
        kgrid=kgrid,
        nu=nu,
        g_k=g_k,
        pulse=None,
        leak_rate=params.leak_rate,
        a1_0=0.0 + 0j,
        a3_0=1.0 + 0j,
        c2_0=None,
        store_times=store_times,
    )
    norm_deficit = 1.0 - (np.abs(c1) ** 2 + p0)
    return TwoLevelTrajectory(tgrid, kgrid, c1, p0, norm_deficit, c0, ft, field)


def _check_alias(xgrid: np.ndarray, kgrid: KGrid):
    dx = float(np.max(np.diff(xgrid)))
    limit = np.pi * HBAR / float(kgrid.k[-1])
    if dx > limit:
        raise GridError(f"x spacing {dx:.3g} um aliases k_max; need dx <= {limit:.3g} um")


def _render_field(c0: np.ndarray, kgrid: KGrid, xgrid: np.ndarray) -> np.ndarray:
    phases = np.exp(1j * np.outer(xgrid, kgrid.k) / HBAR)
    return (phases @ c0) * kgrid.dk / np.sqrt(2.0 * np.pi * HBAR)


def field_snapshot(
    c0_at_t0: np.ndarray,
    t0: float,
    times,
    xgrid: np.ndarray,
    kgrid: KGrid,
    params: TwoLevelParams,
) -> list[FieldSnapshot]:
    """Real-space field from the frozen emission state C0(k, T0).

    f(x,t) = (2 pi hbar)^{-1/2} sum_k C0(k,T0) e^{-i omega_k (t-t0)/hbar}
             e^{i k x/hbar} dk, evaluated in the frame rotating at omega0.
    The atom sits at x = 0.  Freezing C0 drops the atom amplitude, so the
    localized component dephases; see snapshots_from_trajectory for the
    propagated alternative.
    """
    c0_at_t0 = np.asarray(c0_at_t0, dtype=complex)
    if c0_at_t0.shape != kgrid.k.shape:
        raise GridError("C0 must be sampled on the k grid")
    xgrid = np.asarray(xgrid, dtype=float)
    _check_alias(xgrid, kgrid)
    deltas = detuning_of_k(kgrid.k, params.model)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = []
    for t in times:
        evolved = c0_at_t0 * np.exp(-1j * deltas * (t - t0) / HBAR)
        out.append(FieldSnapshot(xgrid, _render_field(evolved, kgrid, xgrid), float(t)))
    return out


def snapshots_from_trajectory(
    traj: TwoLevelTrajectory,
    params: TwoLevelParams,
    xgrid: np.ndarray,
) -> list[FieldSnapshot]:
    """Real-space field at the trajectory's stored times (atom kept).

    Uses the actually propagated C0(k, t), so the bound-polariton cloud stays
    localized instead of dephasing as in the frozen-state formula.
    """
    xgrid = np.asarray(xgrid, dtype=float)
    _check_alias(xgrid, traj.kgrid)
    deltas = detuning_of_k(traj.kgrid.k, params.model)
    out = []
    for t, c0 in zip(traj.field_times, traj.field):
        lab = c0 * np.exp(-1j * deltas * t / HBAR)
        out.append(FieldSnapshot(xgrid, _render_field(lab, traj.kgrid, xgrid), float(t)))
    return out
