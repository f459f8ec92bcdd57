"""Closed-form self-energy of a transition coupled to the square-root edge.

Shared by the emission module and the pulse-design comparator.  With
A = g^2 sqrt(omega0/2)/v and delta = omega - omega0:

    Gamma(omega) = 2 pi A / sqrt(delta)          for delta > 0, else 0

and the principal-value level shift

    infinite band:   Delta = -pi A / sqrt(-delta)   (delta < 0),  0 above
    band top L:      Delta = -(2A/s) arctan(U/s)    (s = sqrt(-delta))
                     Delta = (A/b) ln|(U+b)/(U-b)|  (b = sqrt(delta))

with U = sqrt(L - omega0).  All detunings are computed before any large
absolute frequencies enter, to avoid cancellation at omega ~ 1e6 meV.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .model import WaveguideModel


def edge_strength(model: WaveguideModel) -> float:
    """A = g^2 sqrt(omega0/2)/v (meV^(3/2)): Gamma = 2 pi A / sqrt(delta)."""
    return model.g**2 * np.sqrt(model.omega0 / 2.0) / model.v


def gamma_at(omega, model: WaveguideModel):
    """Decay rate 2 pi g^2 DOS(omega); zero at and below the edge."""
    omega = np.asarray(omega, dtype=float)
    return gamma_at_detuning(omega - model.omega0, model)


def gamma_at_detuning(delta, model: WaveguideModel):
    """Same rate as a function of delta = omega - omega0.

    Quadratures must call this form: going through absolute frequencies
    near 1e6 meV rounds small detunings away.
    """
    delta = np.asarray(delta, dtype=float)
    out = np.zeros_like(delta)
    above = delta > 0
    with np.errstate(divide="ignore"):
        out[above] = 2.0 * np.pi * edge_strength(model) / np.sqrt(delta[above])
    return float(out) if out.ndim == 0 else out


def shift_infinite(omega, model: WaveguideModel):
    """Level shift for an infinite band; singular exactly at the edge."""
    omega = np.asarray(omega, dtype=float)
    delta = omega - model.omega0
    if np.any(delta == 0):
        raise DomainError("the level shift is singular exactly at the cut-off")
    A = edge_strength(model)
    out = np.where(delta < 0, -np.pi * A / np.sqrt(np.abs(delta)), 0.0)
    return float(out) if out.ndim == 0 else out


def shift_band_limited(omega, model: WaveguideModel, band_top: float):
    """Level shift for a band truncated at `band_top` (exact PV result)."""
    omega = np.asarray(omega, dtype=float)
    omega0 = model.omega0
    if band_top <= omega0:
        raise DomainError("band_top must lie above the cut-off")
    delta = omega - omega0
    if np.any(delta == 0):
        raise DomainError("the level shift is singular exactly at the cut-off")
    A = edge_strength(model)
    U = np.sqrt(band_top - omega0)
    out = np.empty_like(delta)
    below = delta < 0
    s = np.sqrt(np.abs(delta[below]))
    out[below] = -(2.0 * A / s) * np.arctan(U / s)
    b = np.sqrt(delta[~below])
    with np.errstate(divide="ignore"):
        out[~below] = (A / b) * np.log(np.abs((U + b) / (U - b)))
    return float(out) if out.ndim == 0 else out


def shift_derivative_below(omega: float, model: WaveguideModel, band_top: float | None) -> float:
    """d(shift)/d(omega) below the edge (analytic), for pole residues."""
    omega0 = model.omega0
    if omega >= omega0:
        raise DomainError("the residue derivative is defined below the edge")
    A = edge_strength(model)
    s = np.sqrt(omega0 - omega)
    if band_top is None:
        return float(-(np.pi * A / 2.0) * s**-3)
    U = np.sqrt(band_top - omega0)
    return float(-(A / s**3) * np.arctan(U / s) - A * U / (s**2 * (s**2 + U**2)))
