"""Waveguide model: dispersion, density of states, coupling calibration, grids.

The single-mode waveguide has the massive-particle dispersion

    omega(k) = sqrt(omega0^2 + v^2 k^2)

with a lower cut-off omega0 and a density of states

    DOS(omega) = sqrt(omega0/2) / (v * sqrt(omega - omega0))

that diverges at the edge.  All operations here are pure functions of their
arguments; energies are in meV (see units.py).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, GridError
from .units import C_UM_PER_PS

# Anchor for the dipole -> emission-rate helper: 75 Debye gives 0.27 meV at
# 1 meV above the edge.
REFERENCE_DIPOLE_DEBYE = 75.0
REFERENCE_RATE_MEV = 0.27


@dataclass(frozen=True)
class WaveguideModel:
    """Physical configuration of the waveguide channel.

    omega0: cut-off angular frequency (meV)
    v: propagation-speed parameter c/n (um/ps)
    g: flat coupling constant (meV*um^(1/2))
    leak_rate: free-space leakage rate gamma' (meV)
    """

    omega0: float
    v: float = C_UM_PER_PS
    g: float = 0.0
    leak_rate: float = 0.0

    def __post_init__(self):
        if self.omega0 <= 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")
        if self.v <= 0:
            raise DomainError(f"v must be positive, got {self.v}")
        if self.g < 0:
            raise DomainError(f"g must be nonnegative, got {self.g}")
        if self.leak_rate < 0:
            raise DomainError(f"leak_rate must be nonnegative, got {self.leak_rate}")

    def with_coupling(self, g: float) -> "WaveguideModel":
        return replace(self, g=g)


@dataclass(frozen=True)
class KGrid:
    """Uniform grid of wavevectors, strictly positive and increasing."""

    k: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        object.__setattr__(self, "k", k)
        if k.ndim != 1 or k.size < 2:
            raise GridError("k grid must be a 1-D array with at least two points")
        if k[0] <= 0:
            raise GridError("k grid must start above 0")
        if np.any(np.diff(k) <= 0):
            raise GridError("k grid must be strictly increasing")
        # uniformity as deviation from the affine fit, so element-wise
        # construction rounding (~eps * n) does not trip the check
        dk = (k[-1] - k[0]) / (k.size - 1)
        if np.max(np.abs(k - (k[0] + dk * np.arange(k.size)))) > 1e-12 * k[-1]:
            raise GridError("k grid spacing must be uniform to 1e-12 relative")

    @property
    def dk(self) -> float:
        return float(self.k[1] - self.k[0])

    @property
    def n(self) -> int:
        return self.k.size

    @classmethod
    def for_band(cls, model: WaveguideModel, delta_top: float, n: int) -> "KGrid":
        """Midpoint grid covering detunings (0, delta_top] above the edge.

        Midpoint placement (k_j = (j + 1/2) dk) makes sums over the grid
        second-order accurate approximations of integral(0, k_top) dk without
        losing the half cell at k = 0.
        """
        if delta_top <= 0:
            raise DomainError("delta_top must be positive")
        if n < 8:
            raise GridError("k grid needs at least 8 points")
        k_top = k_of_detuning(delta_top, model)
        dk = k_top / n
        return cls((np.arange(n) + 0.5) * dk)

    def __eq__(self, other) -> bool:
        return isinstance(other, KGrid) and self.k.shape == other.k.shape and bool(
            np.array_equal(self.k, other.k)
        )


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: n steps of size dt from t_start to t_end."""

    t_start: float
    t_end: float
    n: int

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise GridError("t_end must exceed t_start")
        if self.n < 2:
            raise GridError("time grid needs at least 2 steps")

    @classmethod
    def from_step(cls, t_start: float, t_end: float, dt: float) -> "TimeGrid":
        n_float = (t_end - t_start) / dt
        n = int(round(n_float))
        if abs(n_float - n) > 1e-9 * max(1.0, abs(n_float)):
            raise GridError("(t_end - t_start)/dt must be an integer step count")
        return cls(t_start, t_end, n)

    @classmethod
    def centered(cls, center: float, half_width: float, dt_target: float) -> "TimeGrid":
        """Symmetric window around `center`; step count rounded up and even."""
        n = int(np.ceil(2.0 * half_width / dt_target))
        n += n % 2
        return cls(center - half_width, center + half_width, n)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.n

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n + 1)


def omega_of_k(k, model: WaveguideModel):
    """Photon frequency (meV) at wavevector k; monotone increasing in k."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("wavevector must be nonnegative")
    out = np.hypot(model.omega0, model.v * k)
    return float(out) if out.ndim == 0 else out


def detuning_of_k(k, model: WaveguideModel):
    """omega(k) - omega0, computed without cancellation for small v*k."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("wavevector must be nonnegative")
    vk2 = (model.v * k) ** 2
    out = vk2 / (np.hypot(model.omega0, model.v * k) + model.omega0)
    return float(out) if out.ndim == 0 else out


def k_of_omega(omega, model: WaveguideModel):
    """Inverse dispersion; requires omega >= omega0."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < model.omega0):
        raise DomainError("omega below the cut-off has no propagating mode")
    delta = omega - model.omega0
    out = np.sqrt(delta * (delta + 2.0 * model.omega0)) / model.v
    return float(out) if out.ndim == 0 else out


def k_of_detuning(delta, model: WaveguideModel):
    """Wavevector at detuning delta = omega - omega0 >= 0."""
    delta = np.asarray(delta, dtype=float)
    if np.any(delta < 0):
        raise DomainError("detuning below the edge has no propagating mode")
    out = np.sqrt(delta * (delta + 2.0 * model.omega0)) / model.v
    return float(out) if out.ndim == 0 else out


def dos(omega, model: WaveguideModel):
    """Density of states dk/domega (1/(meV um)); diverges at the edge.

    Only the near-edge form sqrt(omega0/2)/(v sqrt(omega-omega0)) is used, as
    everywhere else in the package.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= model.omega0):
        raise DomainError("DOS is undefined at or below the cut-off")
    out = np.sqrt(model.omega0 / 2.0) / (model.v * np.sqrt(omega - model.omega0))
    return float(out) if out.ndim == 0 else out


def group_velocity(omega, model: WaveguideModel):
    """d(omega)/dk at omega > omega0: v * sqrt(1 - (omega0/omega)^2)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= model.omega0):
        raise DomainError("group velocity is undefined at or below the cut-off")
    ratio = model.omega0 / omega
    out = model.v * np.sqrt((1.0 - ratio) * (1.0 + ratio))
    return float(out) if out.ndim == 0 else out


def group_velocity_of_k(k, model: WaveguideModel):
    """d(omega)/dk as a function of k (vectorized, exact form v^2 k / omega)."""
    k = np.asarray(k, dtype=float)
    out = model.v**2 * k / omega_of_k(k, model)
    return float(out) if out.ndim == 0 else out


def markovian_rate(model: WaveguideModel, omega_center: float) -> float:
    """Flat-DOS decay rate gamma = 2 pi g^2 DOS(omega_center) (meV)."""
    return 2.0 * np.pi * model.g**2 * dos(omega_center, model)


def calibrate_coupling(gamma_target: float, omega_center: float, model: WaveguideModel) -> float:
    """Coupling g that gives markovian_rate == gamma_target at omega_center."""
    if gamma_target <= 0:
        raise DomainError("gamma_target must be positive")
    return float(np.sqrt(gamma_target / (2.0 * np.pi * dos(omega_center, model))))


def calibrated_model(gamma_target: float, omega_center: float, model: WaveguideModel) -> WaveguideModel:
    """Copy of `model` with g set so the rate at omega_center is gamma_target."""
    return model.with_coupling(calibrate_coupling(gamma_target, omega_center, model))


def dipole_to_rate(dipole_debye: float) -> float:
    """Map a dipole moment to the waveguide emission rate via gamma ~ p^2.

    Anchored at 75 Debye -> 0.27 meV (rate quoted 1 meV above the edge).
    """
    if dipole_debye <= 0:
        raise DomainError("dipole moment must be positive")
    return REFERENCE_RATE_MEV * (dipole_debye / REFERENCE_DIPOLE_DEBYE) ** 2
