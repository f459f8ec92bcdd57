"""Inverse pulse design for sending and receiving nodes.

Given a target photon wavepacket F(k), the excited-state amplitude follows
from an inverse Fourier transform of F over the band, the continuum field
from a cumulative time integral, the ground-state amplitude from the
normalization condition plus a phase equation, and finally the drive

    Omega(t) = [i hbar C3(t)^{-1} dC1/dt]*

Sending uses boundary conditions C2(k,-inf)=0, C2(k,+inf)=F(k); receiving
uses the reversed ones with the position-dependent coupling g e^{ikL/hbar}.
A Markovian comparator replaces the memory integral by a constant rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DesignError, DomainError, GridError
from .model import (
    KGrid,
    TimeGrid,
    WaveguideModel,
    detuning_of_k,
    group_velocity_of_k,
    markovian_rate,
)
from .units import HBAR_MEV_PS as HBAR
from .wavepacket import SpectralWavepacket, overlap

#: |C3| below this fraction of its maximum is treated as zero in Eq.-(10)-type
#: divisions; the drive is masked there.
C3_MASK_REL = 1e-6
#: |C1|^2 below this value freezes the phase integration (the drive is masked
#: in that region anyway).
C1_SQ_FLOOR = 1e-8
#: normalization deficit below this value marks a non-emittable target
DEFICIT_TOL = -1e-6
#: maximum number of stored continuum-field snapshots
MAX_FIELD_SNAPSHOTS = 512


@dataclass(frozen=True)
class ThreeLevelNode:
    """Lambda-type node: |3>-|2> splitting eps32 inside the continuum."""

    eps32: float
    model: WaveguideModel
    leak_rate: float | None = None

    def __post_init__(self):
        if self.eps32 <= self.model.omega0:
            raise DomainError("eps32 must lie above the waveguide cut-off")

    @property
    def effective_leak_rate(self) -> float:
        return self.model.leak_rate if self.leak_rate is None else self.leak_rate


@dataclass(frozen=True)
class ControlPulse:
    """Complex Rabi frequency samples on a time grid; zero outside the window."""

    tgrid: TimeGrid
    omega_t: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.omega_t, dtype=complex)
        object.__setattr__(self, "omega_t", samples)
        if samples.shape != (self.tgrid.n + 1,):
            raise GridError("pulse samples must match the time grid")
        if not np.all(np.isfinite(samples)):
            raise DesignError("pulse contains non-finite samples")

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.tgrid.times, self.omega_t)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.tgrid.t_start) & (t <= self.tgrid.t_end)
        out = np.where(inside, self._spline(np.clip(t, self.tgrid.t_start, self.tgrid.t_end)), 0.0)
        return complex(out) if out.ndim == 0 else out

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.omega_t)))


@dataclass
class ContinuumHistory:
    """Streaming record of the designed continuum field C2(k, t).

    Only reduced time series (norm p2, phase-flux m_series) are kept densely;
    the full field is stored at a stride plus the exact final column.
    """

    kgrid: KGrid
    p2: np.ndarray
    m_series: np.ndarray
    snapshot_times: np.ndarray
    snapshots: np.ndarray
    final: np.ndarray
    end_overlap: complex


@dataclass
class DesignRecord:
    """Complete design solution for one node.

    a1/a3 are the ground/excited amplitudes (C1, C3 for sending; D1, D3 for
    receiving); p2 is the continuum norm over time.
    """

    role: str
    tgrid: TimeGrid
    kgrid: KGrid
    a1: np.ndarray
    a3: np.ndarray
    pulse: ControlPulse
    p2: np.ndarray
    c2_final: np.ndarray
    c2_snapshot_times: np.ndarray
    c2_snapshots: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def _phase_weights(node: ThreeLevelNode, kgrid: KGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Common k-space factors: detuning nu_k, group velocity, dk measure."""
    nu = detuning_of_k(kgrid.k, node.model) - (node.eps32 - node.model.omega0)
    vg = group_velocity_of_k(kgrid.k, node.model)
    return nu, vg, kgrid.k


def _band_transform(weights: np.ndarray, nu: np.ndarray, times: np.ndarray) -> np.ndarray:
    """sum_k weights_k exp(-i nu_k t / hbar), chunked to bound memory."""
    out = np.empty(times.size, dtype=complex)
    chunk = max(1, int(4e6 // max(nu.size, 1)))
    for lo in range(0, times.size, chunk):
        hi = min(lo + chunk, times.size)
        phases = np.exp(-1j * np.outer(times[lo:hi], nu) / HBAR)
        out[lo:hi] = phases @ weights
    return out


def c3_from_target(
    F: SpectralWavepacket,
    node: ThreeLevelNode,
    tgrid: TimeGrid,
) -> np.ndarray:
    """Excited-state amplitude C3(t) for the sending node.

    C3(t) = (i / 2 pi g) sum_k F(k) v_g(k) exp(-i (omega_k - eps32) t / hbar) dk.
    Raises if the window truncates C3 (ends above 1e-6 of the maximum).
    """
    c3, _ = _c3_and_derivative(F, node, tgrid)
    return c3


def _c3_and_derivative(
    F: SpectralWavepacket,
    node: ThreeLevelNode,
    tgrid: TimeGrid,
    coupling_phase: np.ndarray | None = None,
    sign: float = 1.0,
    edge_tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """C3(t) (or D3 with sign=-1 and a coupling phase) and its time derivative."""
    g = node.model.g
    if g == 0:
        raise DomainError("coupling constant g is zero; target is not invertible")
    nu, vg, _ = _phase_weights(node, F.kgrid)
    w = F.amplitudes * vg * F.kgrid.dk / (2.0 * np.pi * g)
    if coupling_phase is not None:
        w = w * coupling_phase
    times = tgrid.times
    a3 = sign * 1j * _band_transform(w, nu, times)
    da3 = sign * 1j * _band_transform(w * (-1j * nu / HBAR), nu, times)
    peak = float(np.max(np.abs(a3)))
    if peak > 0:
        edge = max(abs(a3[0]), abs(a3[-1]))
        if edge > edge_tol * peak:
            raise DesignError(
                "time window truncates the excited-state amplitude "
                f"(edge/peak = {edge / peak:.2e}); widen the window"
            )
    return a3, da3


def c2_history(
    F: SpectralWavepacket,
    c3: np.ndarray,
    node: ThreeLevelNode,
    tgrid: TimeGrid,
    kgrid: KGrid | None = None,
    initial: np.ndarray | None = None,
    coupling_phase: np.ndarray | None = None,
    check_end: bool = True,
) -> ContinuumHistory:
    """Cumulative continuum field from dC2/dt = -(i/hbar) g* C3 e^{i nu t/hbar}.

    With `initial`/`coupling_phase` set this also serves the receiving node
    (C2 starts at F and is driven by D3 with the g e^{ikL/hbar} coupling).
    For sending, the end state must reproduce F with |overlap| >= 0.999.
    """
    kgrid = kgrid or F.kgrid
    if kgrid != F.kgrid:
        raise GridError("k grid must match the wavepacket grid")
    if c3.shape != (tgrid.n + 1,):
        raise GridError("C3 must be sampled on the time grid")
    nu, _, _ = _phase_weights(node, kgrid)
    phase_k = np.ones(kgrid.n, dtype=complex) if coupling_phase is None else np.conj(coupling_phase)
    g = node.model.g
    dk = kgrid.dk
    times = tgrid.times
    dt = tgrid.dt

    c2 = np.zeros(kgrid.n, dtype=complex) if initial is None else initial.astype(complex).copy()
    p2 = np.empty(times.size)
    m_series = np.empty(times.size, dtype=complex)

    n_snap = min(MAX_FIELD_SNAPSHOTS, times.size)
    snap_idx = np.unique(np.linspace(0, times.size - 1, n_snap).round().astype(int))
    snapshots = np.empty((snap_idx.size, kgrid.n), dtype=complex)
    snap_pos = 0

    # Interaction-picture phases advanced multiplicatively step by step.
    E = np.exp(1j * nu * times[0] / HBAR)
    E_step = np.exp(1j * nu * dt / HBAR)
    coef = -1j * g / HBAR
    h_prev = coef * phase_k * c3[0] * E

    for j in range(times.size):
        if j > 0:
            E = E * E_step
            h_new = coef * phase_k * c3[j] * E
            c2 += (dt / 2.0) * (h_prev + h_new)
            h_prev = h_new
        p2[j] = float(np.sum(np.abs(c2) ** 2)) * dk
        m_series[j] = np.sum(np.conj(c2) * phase_k * E) * dk
        if snap_pos < snap_idx.size and j == snap_idx[snap_pos]:
            snapshots[snap_pos] = c2
            snap_pos += 1

    end_ol = complex(np.sum(np.conj(F.amplitudes) * c2) * dk)
    if check_end and abs(end_ol) < 0.99:
        raise GridError(
            f"end-state overlap with the target is {abs(end_ol):.4f} < 0.99; "
            "grids are inconsistent with the design"
        )
    return ContinuumHistory(
        kgrid=kgrid,
        p2=p2,
        m_series=m_series,
        snapshot_times=times[snap_idx],
        snapshots=snapshots,
        final=c2,
        end_overlap=end_ol,
    )


def c1_reconstruct(
    c3: np.ndarray,
    history: ContinuumHistory,
    tgrid: TimeGrid,
    dc3: np.ndarray | None = None,
    g: float = 0.0,
    backward: bool = False,
) -> np.ndarray:
    """Ground-state amplitude from normalization and the phase equation.

    |C1|^2 = 1 - |C3|^2 - sum |C2|^2 dk, and

        dphi1/dt = (|C3|^2 dphi3/dt - sum_k |C2|^2 dphi2/dt dk) / |C1|^2

    where both numerator terms are evaluated as Im[conj(C3) dC3] and the
    streaming flux Re[C3 M] (algebraically identical to the unwrapped-phase
    form, and well behaved where amplitudes vanish).  Integration freezes
    once |C1|^2 < 1e-8; `backward` integrates from t_end instead (receiving).
    """
    deficit = 1.0 - np.abs(c3) ** 2 - history.p2
    if deficit.min() < DEFICIT_TOL:
        raise DesignError(
            f"normalization deficit reaches {deficit.min():.2e}; "
            "the target cannot be emitted at unit amplitude"
        )
    r1 = np.sqrt(np.clip(deficit, 0.0, None))

    if dc3 is None:
        dc3 = np.gradient(c3, tgrid.dt)
    numerator = np.imag(np.conj(c3) * dc3) + (g / HBAR) * np.real(c3 * history.m_series)
    r1sq = r1**2
    valid = r1sq >= C1_SQ_FLOOR
    rate = np.zeros_like(r1sq)
    rate[valid] = numerator[valid] / r1sq[valid]

    dt = tgrid.dt
    phi = np.zeros_like(r1sq)
    if not backward:
        frozen = False
        for j in range(1, phi.size):
            if frozen or not (valid[j] and valid[j - 1]):
                if j > 1 and not valid[j]:
                    frozen = True
                phi[j] = phi[j - 1]
                continue
            phi[j] = phi[j - 1] + 0.5 * dt * (rate[j] + rate[j - 1])
    else:
        frozen = False
        for j in range(phi.size - 2, -1, -1):
            if frozen or not (valid[j] and valid[j + 1]):
                if not valid[j]:
                    frozen = True
                phi[j] = phi[j + 1]
                continue
            phi[j] = phi[j + 1] - 0.5 * dt * (rate[j] + rate[j + 1])
    return r1 * np.exp(1j * phi)


def _masked_ratio(
    numer: np.ndarray, a3: np.ndarray, a1: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """conj(i hbar numer / a3), zeroed where either amplitude is below threshold.

    The |a1|^2 floor removes drive samples that act on a noise-level ground
    amplitude (late times for sending, pre-arrival for receiving).
    """
    peak = float(np.max(np.abs(a3)))
    mask = np.abs(a3) >= C3_MASK_REL * peak if peak > 0 else np.zeros(a3.shape, bool)
    mask &= np.abs(a1) ** 2 >= C1_SQ_FLOOR
    out = np.zeros_like(a3)
    out[mask] = np.conj(1j * HBAR * numer[mask] / a3[mask])
    return out, mask


def _check_active_window(mask: np.ndarray):
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise DesignError("excited-state amplitude never rises above threshold")
    span = idx[-1] - idx[0] + 1
    if mask[idx[0] : idx[-1] + 1].sum() < 0.5 * span:
        raise DesignError("excited-state amplitude is below threshold over half the active window")
    return idx[0], idx[-1]


def design_sending_pulse(
    F: SpectralWavepacket,
    node: ThreeLevelNode,
    tgrid: TimeGrid,
    kgrid: KGrid | None = None,
) -> DesignRecord:
    """Exact non-Markovian drive that emits F from the sending node."""
    kgrid = kgrid or F.kgrid
    if float(np.max(np.abs(F.amplitudes))) == 0.0:
        zeros_t = np.zeros(tgrid.n + 1, dtype=complex)
        pulse = ControlPulse(tgrid, zeros_t)
        return DesignRecord(
            role="sending",
            tgrid=tgrid,
            kgrid=kgrid,
            a1=np.ones(tgrid.n + 1, dtype=complex),
            a3=zeros_t,
            pulse=pulse,
            p2=np.zeros(tgrid.n + 1),
            c2_final=np.zeros(kgrid.n, dtype=complex),
            c2_snapshot_times=np.array([tgrid.t_start, tgrid.t_end]),
            c2_snapshots=np.zeros((2, kgrid.n), dtype=complex),
            diagnostics={"end_overlap": 0.0, "max_norm_defect": 0.0},
        )

    c3, dc3 = _c3_and_derivative(F, node, tgrid)
    history = c2_history(F, c3, node, tgrid, kgrid)
    c1 = c1_reconstruct(c3, history, tgrid, dc3=dc3, g=node.model.g)
    dc1 = np.gradient(c1, tgrid.dt)
    omega, mask = _masked_ratio(dc1, c3, c1)
    lo, hi = _check_active_window(mask)
    pulse = ControlPulse(tgrid, omega)

    deficit = 1.0 - np.abs(c3) ** 2 - history.p2
    record = DesignRecord(
        role="sending",
        tgrid=tgrid,
        kgrid=kgrid,
        a1=c1,
        a3=c3,
        pulse=pulse,
        p2=history.p2,
        c2_final=history.final,
        c2_snapshot_times=history.snapshot_times,
        c2_snapshots=history.snapshots,
        diagnostics={
            "end_overlap": abs(history.end_overlap),
            "max_norm_defect": float(max(0.0, -deficit.min())),
            "active_window": (float(tgrid.times[lo]), float(tgrid.times[hi])),
            "omega_max": pulse.max_abs,
        },
    )
    return record


def _markovian_from_c3(
    c3: np.ndarray,
    dc3: np.ndarray,
    tgrid: TimeGrid,
    gamma: float,
    level_shift: float = 0.0,
) -> ControlPulse:
    """Drive from the constant-response model, given the designed C3(t).

    The memory integral is replaced by the central-frequency self-energy
    (level_shift - i gamma/2), so W = Omega*C1 = i hbar dC3 - level_shift C3
    + i (gamma/2) C3; |C1| follows from |C1|^2 = 1 - |C3|^2 -
    (gamma/hbar) int |C3|^2 dt and the phase from
    dphi1/dt = -Re[conj(W) C3] / (hbar |C1|^2).  level_shift vanishes for an
    infinite band; on a truncated k grid it is the band's static shift, which
    keeps the comparison with the exact design free of truncation artifacts.
    """
    dt = tgrid.dt
    W = 1j * HBAR * dc3 - level_shift * c3 + 0.5j * gamma * c3
    emitted = np.concatenate(
        ([0.0], np.cumsum(0.5 * dt * (np.abs(c3[1:]) ** 2 + np.abs(c3[:-1]) ** 2)))
    ) * (gamma / HBAR)
    r1sq = 1.0 - np.abs(c3) ** 2 - emitted
    # Rate-equation bookkeeping need not close exactly for a non-Markovian
    # target; small negative residues are clamped rather than rejected.
    if r1sq.min() < -0.05:
        raise DesignError("Markovian bookkeeping fails badly; target too fast for the rate model")
    r1sq = np.clip(r1sq, 0.0, None)

    valid = r1sq >= C1_SQ_FLOOR
    rate = np.zeros_like(r1sq)
    rate[valid] = -np.real(np.conj(W[valid]) * c3[valid]) / (HBAR * r1sq[valid])
    phi = np.zeros_like(r1sq)
    frozen = False
    for j in range(1, phi.size):
        if frozen or not (valid[j] and valid[j - 1]):
            if not valid[j]:
                frozen = True
            phi[j] = phi[j - 1]
            continue
        phi[j] = phi[j - 1] + 0.5 * dt * (rate[j] + rate[j - 1])
    c1 = np.sqrt(r1sq) * np.exp(1j * phi)

    omega = np.zeros_like(c3)
    ok = valid & (np.abs(c1) > 0)
    omega[ok] = W[ok] / c1[ok]
    return ControlPulse(tgrid, omega)


def design_sending_pulse_markovian(
    F: SpectralWavepacket,
    node: ThreeLevelNode,
    tgrid: TimeGrid,
) -> ControlPulse:
    """Drive designed under the constant-response (Wigner-Weisskopf) model.

    The decay rate is evaluated at the packet center; the static level shift
    of the k grid's finite band is included so that exact-vs-approximate
    pulse comparisons reflect memory effects, not band truncation.
    """
    if float(np.max(np.abs(F.amplitudes))) == 0.0:
        return ControlPulse(tgrid, np.zeros(tgrid.n + 1, dtype=complex))
    if F.omega1 is not None:
        omega_center = F.omega1
    else:
        weights = np.abs(F.amplitudes) ** 2
        from .model import omega_of_k

        omega_center = float(
            np.sum(omega_of_k(F.kgrid.k, node.model) * weights) / np.sum(weights)
        )
    gamma = markovian_rate(node.model, omega_center)
    from .model import omega_of_k as _omega_of_k
    from .selfenergy import shift_band_limited

    band_top = float(_omega_of_k(F.kgrid.k[-1], node.model))
    shift = float(shift_band_limited(omega_center, node.model, band_top))
    c3, dc3 = _c3_and_derivative(F, node, tgrid)
    return _markovian_from_c3(c3, dc3, tgrid, gamma, level_shift=shift)


def pulse_distance(
    exact: DesignRecord,
    other: ControlPulse,
    remaining_floor: float = 1e-4,
) -> float:
    """Relative L2 distance between two drives over the transfer window.

    The window keeps times where the exact design still holds at least
    `remaining_floor` of the population in the node (|a1|^2 + |a3|^2); beyond
    it both prescriptions steer amplitudes below any observable scale and
    differ only in how they regularize vanishing denominators.
    """
    if other.tgrid != exact.tgrid:
        raise GridError("pulses live on different time grids")
    live = (np.abs(exact.a1) ** 2 + np.abs(exact.a3) ** 2) >= remaining_floor
    ref = np.linalg.norm(exact.pulse.omega_t[live])
    if ref == 0.0:
        return 0.0
    return float(np.linalg.norm((exact.pulse.omega_t - other.omega_t)[live]) / ref)


def design_receiving_pulse(
    F: SpectralWavepacket,
    node: ThreeLevelNode,
    L: float,
    tgrid: TimeGrid,
) -> DesignRecord:
    """Drive that absorbs the incoming packet F at a node a distance L away.

    The node couples through g e^{ikL/hbar}; the time grid should be centered
    near the arrival time t0 = L / v_g(packet center).  Full absorption means
    |D1(t_end)|^2 close to one; below 0.9 is treated as an impedance mismatch.
    """
    if L < 0:
        raise DomainError("waveguide length must be nonnegative")
    kgrid = F.kgrid
    if float(np.max(np.abs(F.amplitudes))) == 0.0:
        zeros_t = np.zeros(tgrid.n + 1, dtype=complex)
        return DesignRecord(
            role="receiving",
            tgrid=tgrid,
            kgrid=kgrid,
            a1=zeros_t.copy(),
            a3=zeros_t.copy(),
            pulse=ControlPulse(tgrid, zeros_t),
            p2=np.zeros(tgrid.n + 1),
            c2_final=np.zeros(kgrid.n, dtype=complex),
            c2_snapshot_times=np.array([tgrid.t_start, tgrid.t_end]),
            c2_snapshots=np.zeros((2, kgrid.n), dtype=complex),
            diagnostics={"absorption": 0.0},
        )

    coupling_phase = np.exp(1j * kgrid.k * L / HBAR)
    # the packet's lower spectral tail rides the slow near-edge group velocity
    # and arrives late at ~1e-5 relative amplitude for any L > 0; tolerate it
    # (truncated population (1e-4)^2) while still catching harmful windows
    d3, dd3 = _c3_and_derivative(
        F, node, tgrid, coupling_phase=coupling_phase, sign=-1.0,
        edge_tol=1e-6 if L == 0 else 1e-4,
    )
    history = c2_history(
        F,
        d3,
        node,
        tgrid,
        kgrid,
        initial=F.amplitudes,
        coupling_phase=coupling_phase,
        check_end=False,
    )
    residual = float(np.sum(np.abs(history.final) ** 2) * kgrid.dk)
    d1 = c1_reconstruct(d3, history, tgrid, dc3=dd3, g=node.model.g, backward=True)
    absorption = float(np.abs(d1[-1]) ** 2)
    if absorption < 0.9:
        raise DesignError(
            f"absorption |D1(t_end)|^2 = {absorption:.4f} < 0.9: impedance mismatch "
            "(grid or window inadequate)"
        )
    dd1 = np.gradient(d1, tgrid.dt)
    omega, mask = _masked_ratio(dd1, d3, d1)
    _check_active_window(mask)

    deficit = 1.0 - np.abs(d3) ** 2 - history.p2
    return DesignRecord(
        role="receiving",
        tgrid=tgrid,
        kgrid=kgrid,
        a1=d1,
        a3=d3,
        pulse=ControlPulse(tgrid, omega),
        p2=history.p2,
        c2_final=history.final,
        c2_snapshot_times=history.snapshot_times,
        c2_snapshots=history.snapshots,
        diagnostics={
            "absorption": absorption,
            "residual_field_norm": residual,
            "max_norm_defect": float(max(0.0, -deficit.min())),
        },
    )
