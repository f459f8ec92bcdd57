"""Figure rendering for scenario reports (PNG files next to the CSV output)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def pulse_comparison(path: Path, t, omega_exact, omega_markov=None) -> Path:
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(t, np.abs(omega_exact), "k-", label="exact")
    if omega_markov is not None:
        axes[0].plot(t, np.abs(omega_markov), "r--", label="Markovian")
    axes[0].set_ylabel(r"$|\Omega|$ (meV)")
    axes[0].legend()
    axes[1].plot(t, omega_exact.real, "k-", label="Re exact")
    axes[1].plot(t, omega_exact.imag, "b-", lw=0.8, label="Im exact")
    axes[1].set_xlabel("t (ps)")
    axes[1].set_ylabel(r"$\Omega$ (meV)")
    axes[1].legend()
    for ax in axes:
        ax.grid(True, alpha=0.3)
    return _save(fig, path)


def populations(path: Path, t, p1, p3, p2) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(t, p1, "b:", label=r"$|1\rangle$")
    ax.plot(t, p2, "r--", label=r"$|2\rangle$ (photon emitted)")
    ax.plot(t, p3, "k-", label=r"$|3\rangle$")
    ax.set_xlabel("t (ps)")
    ax.set_ylabel("population")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def packet(path: Path, omega_detuning, f_out, f_ideal, dos_curve=None) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(omega_detuning, f_ideal.real, "r--", label="ideal (real)")
    ax.plot(omega_detuning, f_out.real, "k-", label="Re output")
    ax.plot(omega_detuning, f_out.imag, "k-^", ms=2.5, lw=0.8, markevery=12, label="Im output")
    ax.set_xlabel(r"$\omega-\omega_0$ (meV)")
    ax.set_ylabel(r"$F(k)$ (um$^{1/2}$)")
    ax.legend(loc="upper left")
    ax.grid(True, alpha=0.3)
    if dos_curve is not None:
        twin = ax.twinx()
        twin.plot(omega_detuning, dos_curve, "b-", lw=0.8, alpha=0.6)
        twin.set_ylabel("DOS (arb.)", color="b")
    return _save(fig, path)


def emission_decay(path: Path, t, curves: dict[str, np.ndarray]) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    styles = {"exact": "r-", "direct": "k--", "markovian": "k:", "leaky": "b--"}
    for name, y in curves.items():
        ax.plot(t, y, styles.get(name, "-"), label=name)
    ax.set_xlabel("t (ps)")
    ax.set_ylabel("excited population")
    ax.set_ylim(0, 1.02)
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def self_energy(path: Path, detuning, gamma_curve, delta_curve) -> Path:
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(detuning, gamma_curve, "k-")
    axes[0].set_ylabel(r"$\Gamma(\omega)$ (meV)")
    axes[1].plot(detuning, delta_curve, "b-")
    axes[1].set_ylabel(r"$\Delta(\omega)$ (meV)")
    axes[1].set_xlabel(r"$\omega-\omega_0$ (meV)")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    return _save(fig, path)


def field_snapshots(path: Path, snapshots) -> Path:
    fig, ax = plt.subplots(figsize=(7.5, 5))
    offset = 0.0
    step = 1.1 * max(np.max(np.abs(s.f) ** 2) for s in snapshots)
    for snap in snapshots:
        ax.plot(snap.x, np.abs(snap.f) ** 2 + offset, label=f"t = {snap.t:g} ps")
        offset += step
    ax.set_xlabel("x (um)")
    ax.set_ylabel(r"$|f(x,t)|^2$ + offset (1/um)")
    ax.legend(fontsize="small")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)
