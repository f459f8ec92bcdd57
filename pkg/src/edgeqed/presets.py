"""Default grid construction for the interface and emission problems.

The k grid is uniform in k (which regularizes the edge since the measure is
dk); its size is chosen so the mode spacing resolves the packet width and the
discrete-continuum recurrence time exceeds the simulation window.  The time
step resolves the fastest interaction-picture phase on the grid.
"""

from __future__ import annotations

import warnings

import numpy as np

from .model import (
    KGrid,
    TimeGrid,
    WaveguideModel,
    detuning_of_k,
    group_velocity,
    markovian_rate,
)
from .pulse_design import ThreeLevelNode
from .units import HBAR_MEV_PS as HBAR

_KGRID_SIZES = (512, 1024, 2048, 4096)
#: phase advance per step of the fastest grid mode, in radians
_PHASE_PER_STEP = 0.05
#: recurrence safety factor relative to the time window
_RECURRENCE_MARGIN = 1.4


def interface_kgrid(
    node: ThreeLevelNode,
    omega1: float,
    sigma0: float,
    window: float,
    n_k: int | None = None,
    delta_top: float | None = None,
) -> KGrid:
    """k grid for design/propagation of a packet centered at omega1."""
    model = node.model
    delta1 = omega1 - model.omega0
    if delta_top is None:
        delta_top = delta1 + max(40.0 * sigma0, 0.5)
    if n_k is not None:
        return KGrid.for_band(model, delta_top, n_k)
    t_span = 2.0 * window
    for n in _KGRID_SIZES:
        grid = KGrid.for_band(model, delta_top, n)
        d_omega_packet = group_velocity(omega1, model) * grid.dk
        d_omega_top = group_velocity(model.omega0 + delta_top, model) * grid.dk
        resolves = d_omega_packet <= sigma0 / 12.0
        recurs = (2.0 * np.pi * HBAR / max(d_omega_packet, d_omega_top)) >= _RECURRENCE_MARGIN * t_span
        if resolves and recurs:
            return grid
    warnings.warn("k grid capped at 4096 points; resolution targets not fully met")
    return grid


def interface_tgrid(
    node: ThreeLevelNode,
    kgrid: KGrid,
    sigma0: float,
    omega1: float,
    center: float = 0.0,
    window: float | None = None,
    dt: float | None = None,
) -> TimeGrid:
    """Design window +-max(10 hbar/sigma0, 20 hbar/gamma) around `center`."""
    gamma = markovian_rate(node.model, omega1)
    if window is None:
        window = design_window(sigma0, gamma)
    if dt is None:
        deltas = detuning_of_k(kgrid.k, node.model)
        d_eps = node.eps32 - node.model.omega0
        span = float(max(abs(deltas[0] - d_eps), abs(deltas[-1] - d_eps), gamma))
        dt = _PHASE_PER_STEP * HBAR / span
    return TimeGrid.centered(center, window, dt)


def design_window(sigma0: float, gamma: float) -> float:
    """Half-width covering both the packet duration and the emission memory."""
    return max(10.0 * HBAR / sigma0, 20.0 * HBAR / gamma)


def emission_kgrid(
    model: WaveguideModel,
    omega10: float,
    band_top_delta: float = 80.0,
    n_k: int | None = None,
    t_span: float = 10.0,
) -> KGrid:
    """k grid for the two-level emission problem with a wide band top."""
    delta10 = omega10 - model.omega0
    if band_top_delta <= delta10:
        band_top_delta = 4.0 * delta10 + 40.0
    gamma = markovian_rate(model, omega10)
    if n_k is not None:
        return KGrid.for_band(model, band_top_delta, n_k)
    for n in _KGRID_SIZES:
        grid = KGrid.for_band(model, band_top_delta, n)
        d_omega_res = group_velocity(omega10, model) * grid.dk
        fine = d_omega_res <= max(gamma, delta10) / 25.0
        recurs = (2.0 * np.pi * HBAR / d_omega_res) >= _RECURRENCE_MARGIN * t_span
        if fine and recurs:
            return grid
    warnings.warn("emission k grid capped at 4096 points")
    return grid


def emission_tgrid(
    model: WaveguideModel,
    omega10: float,
    kgrid: KGrid,
    t_max: float = 10.0,
    dt: float | None = None,
) -> TimeGrid:
    if dt is None:
        deltas = detuning_of_k(kgrid.k, model)
        delta10 = omega10 - model.omega0
        span = float(max(abs(deltas[-1] - delta10), delta10, markovian_rate(model, omega10)))
        dt = _PHASE_PER_STEP * HBAR / span
    n = int(np.ceil(t_max / dt))
    return TimeGrid(0.0, t_max, n)
