"""Spectral photon wavepackets on a k-grid and their inner product."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridError
from .model import KGrid, WaveguideModel, omega_of_k

#: coverage (in units of sigma0 around omega1) below which construction fails
MIN_COVERAGE_SIGMAS = 10.0
#: coverage below which a truncation warning is issued
RECOMMENDED_COVERAGE_SIGMAS = 20.0


@dataclass(frozen=True)
class SpectralWavepacket:
    """Complex photon amplitude F(k) aligned with a KGrid.

    Normalized wavepackets satisfy sum |F|^2 dk = 1.  omega1/sigma0 record the
    center and width when the packet is sech-shaped.
    """

    amplitudes: np.ndarray
    kgrid: KGrid
    omega1: float | None = None
    sigma0: float | None = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != self.kgrid.k.shape:
            raise GridError("amplitude array must match the k grid")

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.kgrid.dk)

    def scaled(self, factor: complex) -> "SpectralWavepacket":
        return SpectralWavepacket(self.amplitudes * factor, self.kgrid, self.omega1, self.sigma0)


def sech_wavepacket(
    omega1: float,
    sigma0: float,
    kgrid: KGrid,
    model: WaveguideModel,
) -> SpectralWavepacket:
    """Normalized F(k) = C sech[(omega_k - omega1)/sigma0], real and positive.

    The grid must cover at least +-10 sigma0 around omega1 in frequency (the
    lower side may be capped by the band edge); +-20 sigma0 is recommended and
    omega1 - 5 sigma0 should lie above the edge, otherwise a warning is issued.
    """
    if sigma0 <= 0:
        raise DomainError("sigma0 must be positive")
    if omega1 <= model.omega0:
        raise DomainError("omega1 must lie above the cut-off")

    omegas = omega_of_k(kgrid.k, model)
    lo, hi = float(omegas[0]), float(omegas[-1])
    if hi < omega1 + MIN_COVERAGE_SIGMAS * sigma0:
        raise GridError(
            "k grid covers only %.3g sigma0 above omega1; need >= %.0f "
            "(truncation would break normalization)" % ((hi - omega1) / sigma0, MIN_COVERAGE_SIGMAS)
        )
    lower_target = omega1 - MIN_COVERAGE_SIGMAS * sigma0
    if lower_target > model.omega0 and lo > lower_target:
        raise GridError(
            "k grid covers only %.3g sigma0 below omega1; need >= %.0f "
            "(truncation would break normalization)" % ((omega1 - lo) / sigma0, MIN_COVERAGE_SIGMAS)
        )
    if omega1 - 5.0 * sigma0 <= model.omega0:
        warnings.warn("omega1 - 5 sigma0 reaches the band edge; the sech is edge-truncated")
    if (hi < omega1 + RECOMMENDED_COVERAGE_SIGMAS * sigma0) or (
        omega1 - RECOMMENDED_COVERAGE_SIGMAS * sigma0 > model.omega0
        and lo > omega1 - RECOMMENDED_COVERAGE_SIGMAS * sigma0
    ):
        warnings.warn("k grid covers less than +-20 sigma0 around omega1")

    profile = 1.0 / np.cosh((omegas - omega1) / sigma0)
    norm = np.sqrt(np.sum(profile**2) * kgrid.dk)
    return SpectralWavepacket(profile / norm + 0j, kgrid, omega1=omega1, sigma0=sigma0)


def overlap(a: SpectralWavepacket, b: SpectralWavepacket) -> complex:
    """Inner product sum conj(a) b dk; |overlap| <= 1 for normalized packets."""
    if a.kgrid != b.kgrid:
        raise GridError("wavepackets live on different k grids")
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes) * a.kgrid.dk)
