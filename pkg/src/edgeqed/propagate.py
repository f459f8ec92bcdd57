"""Forward time evolution of a node coupled to the discretized continuum.

The state (a1, a3, C2(k)) evolves under the interaction-picture equations

    da1/dt = -(i/hbar) conj(Omega) a3
    da3/dt = -(i/hbar) Omega a1 - (i/hbar) sum_k g_k C2_k e^{-i nu_k t/hbar} dk
             - (gamma'/2 hbar) a3
    dC2_k/dt = -(i/hbar) conj(g_k) a3 e^{+i nu_k t/hbar}

with nu_k = omega_k - eps32, integrated by fixed-step classical RK4 (method
of lines over k).  The same core serves sending, receiving (g_k carries the
e^{ikL/hbar} position phase) and the two-level emission problem (no drive).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, ToleranceError
from .model import KGrid, TimeGrid, detuning_of_k
from .pulse_design import ControlPulse, ThreeLevelNode
from .units import HBAR_MEV_PS as HBAR
from .wavepacket import SpectralWavepacket

MAX_FIELD_SNAPSHOTS = 512
#: total norm above 1 + this (with leak_rate >= 0) flags step-size instability
NORM_BLOWUP_TOL = 1e-3


@dataclass
class Trajectory:
    """Time histories of the discrete amplitudes plus the continuum field.

    a1/a3 hold (C1, C3) for sending and (D1, D3) for receiving; the continuum
    field is stored at a stride with the exact final state always kept.
    norm_deficit = 1 - total norm is ~0 without leakage and nondecreasing
    with it.
    """

    role: str
    tgrid: TimeGrid
    kgrid: KGrid
    a1: np.ndarray
    a3: np.ndarray
    p2: np.ndarray
    norm_deficit: np.ndarray
    c2_final: np.ndarray
    field_times: np.ndarray
    field: np.ndarray
    leak_rate: float

    @property
    def absorption(self) -> float:
        return float(np.abs(self.a1[-1]) ** 2)


def _integrate(
    *,
    tgrid: TimeGrid,
    kgrid: KGrid,
    nu: np.ndarray,
    g_k: np.ndarray,
    pulse: ControlPulse | None,
    leak_rate: float,
    a1_0: complex,
    a3_0: complex,
    c2_0: np.ndarray | None,
    store_times: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    times = tgrid.times
    dt = tgrid.dt
    dk = kgrid.dk
    n = tgrid.n

    g_conj = np.conj(g_k)
    half_leak = leak_rate / (2.0 * HBAR)
    inv_h = 1.0 / HBAR

    if pulse is None:
        om_node = np.zeros(n + 1, dtype=complex)
        om_mid = np.zeros(n, dtype=complex)
    else:
        om_node = np.asarray(pulse(times), dtype=complex)
        om_mid = np.asarray(pulse(times[:-1] + 0.5 * dt), dtype=complex)

    a1 = np.empty(n + 1, dtype=complex)
    a3 = np.empty(n + 1, dtype=complex)
    p2 = np.empty(n + 1)
    a1[0] = a1_0
    a3[0] = a3_0
    c2 = np.zeros(kgrid.n, dtype=complex) if c2_0 is None else c2_0.astype(complex).copy()
    p2[0] = float(np.sum(np.abs(c2) ** 2)) * dk

    if store_times is None:
        n_snap = min(MAX_FIELD_SNAPSHOTS, n + 1)
        snap_idx = np.unique(np.linspace(0, n, n_snap).round().astype(int))
    else:
        snap_idx = np.unique(
            np.clip(np.round((np.asarray(store_times) - times[0]) / dt).astype(int), 0, n)
        )
        if snap_idx[-1] != n:
            snap_idx = np.append(snap_idx, n)
    snapshots = np.empty((snap_idx.size, kgrid.n), dtype=complex)
    snap_pos = 0

    e_half = np.exp(0.5j * nu * dt / HBAR)

    def rhs(om, E, y1, y3, yc):
        mem = np.sum(g_k * yc * np.conj(E)) * dk
        d1 = -1j * inv_h * np.conj(om) * y3
        d3 = -1j * inv_h * (om * y1 + mem) - half_leak * y3
        dc = (-1j * inv_h * y3) * (g_conj * E)
        return d1, d3, dc

    if snap_pos < snap_idx.size and snap_idx[snap_pos] == 0:
        snapshots[snap_pos] = c2
        snap_pos += 1

    for j in range(n):
        t = times[j]
        E0 = np.exp(1j * nu * t / HBAR)
        Em = E0 * e_half
        E1 = Em * e_half
        y1, y3 = a1[j], a3[j]

        k1 = rhs(om_node[j], E0, y1, y3, c2)
        k2 = rhs(om_mid[j], Em, y1 + 0.5 * dt * k1[0], y3 + 0.5 * dt * k1[1], c2 + 0.5 * dt * k1[2])
        k3 = rhs(om_mid[j], Em, y1 + 0.5 * dt * k2[0], y3 + 0.5 * dt * k2[1], c2 + 0.5 * dt * k2[2])
        k4 = rhs(om_node[j + 1], E1, y1 + dt * k3[0], y3 + dt * k3[1], c2 + dt * k3[2])

        a1[j + 1] = y1 + (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        a3[j + 1] = y3 + (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        c2 += (dt / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        p2[j + 1] = float(np.sum(np.abs(c2) ** 2)) * dk

        if snap_pos < snap_idx.size and snap_idx[snap_pos] == j + 1:
            snapshots[snap_pos] = c2
            snap_pos += 1

        norm = abs(a1[j + 1]) ** 2 + abs(a3[j + 1]) ** 2 + p2[j + 1]
        if norm > 1.0 + NORM_BLOWUP_TOL:
            raise ToleranceError(
                f"norm grew to {norm:.6f} at t = {times[j + 1]:.3f} ps: "
                "step-size instability, reduce dt"
            )

    return a1, a3, p2, c2, times[snap_idx], snapshots


def propagate_sending(
    pulse: ControlPulse | None,
    node: ThreeLevelNode,
    kgrid: KGrid,
    tgrid: TimeGrid,
    leak_rate: float | None = None,
    initial_state: tuple[complex, complex, np.ndarray | None] | None = None,
    store_times: np.ndarray | None = None,
) -> Trajectory:
    """Evolve the sending node from |1> under a drive; final C2 is the packet."""
    leak = node.effective_leak_rate if leak_rate is None else leak_rate
    nu = detuning_of_k(kgrid.k, node.model) - (node.eps32 - node.model.omega0)
    g_k = np.full(kgrid.n, node.model.g, dtype=complex)
    a1_0, a3_0, c2_0 = (1.0 + 0j, 0.0 + 0j, None) if initial_state is None else initial_state
    a1, a3, p2, c2, ft, field = _integrate(
        tgrid=tgrid,
        kgrid=kgrid,
        nu=nu,
        g_k=g_k,
        pulse=pulse,
        leak_rate=leak,
        a1_0=a1_0,
        a3_0=a3_0,
        c2_0=c2_0,
        store_times=store_times,
    )
    norm_deficit = 1.0 - (np.abs(a1) ** 2 + np.abs(a3) ** 2 + p2)
    return Trajectory("sending", tgrid, kgrid, a1, a3, p2, norm_deficit, c2, ft, field, leak)


def propagate_receiving(
    pulse: ControlPulse | None,
    incoming: SpectralWavepacket,
    node: ThreeLevelNode,
    L: float,
    kgrid: KGrid,
    tgrid: TimeGrid,
    leak_rate: float | None = None,
    store_times: np.ndarray | None = None,
) -> Trajectory:
    """Evolve the receiving node against an incoming packet; reports |D1|^2.

    The incoming field is the interaction-picture amplitude F(k) (constant
    under free evolution); the node position enters through g e^{ikL/hbar}.
    """
    if kgrid != incoming.kgrid:
        raise GridError("incoming packet and propagation k grid differ")
    leak = node.effective_leak_rate if leak_rate is None else leak_rate
    nu = detuning_of_k(kgrid.k, node.model) - (node.eps32 - node.model.omega0)
    g_k = node.model.g * np.exp(1j * kgrid.k * L / HBAR)
    a1, a3, p2, c2, ft, field = _integrate(
        tgrid=tgrid,
        kgrid=kgrid,
        nu=nu,
        g_k=g_k,
        pulse=pulse,
        leak_rate=leak,
        a1_0=0.0 + 0j,
        a3_0=0.0 + 0j,
        c2_0=incoming.amplitudes,
        store_times=store_times,
    )
    norm_deficit = 1.0 - (np.abs(a1) ** 2 + np.abs(a3) ** 2 + p2)
    return Trajectory("receiving", tgrid, kgrid, a1, a3, p2, norm_deficit, c2, ft, field, leak)


def sending_fidelity(traj: Trajectory, ideal: SpectralWavepacket) -> float:
    """|<F_ideal | C2(t_end)>| of the emitted packet (unnormalized)."""
    if traj.kgrid != ideal.kgrid:
        raise GridError("trajectory and ideal packet live on different k grids")
    return float(abs(np.sum(np.conj(ideal.amplitudes) * traj.c2_final) * traj.kgrid.dk))


def population_traces(traj: Trajectory) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(|a1|^2, |a3|^2, continuum norm) over the trajectory times."""
    return np.abs(traj.a1) ** 2, np.abs(traj.a3) ** 2, traj.p2.copy()
