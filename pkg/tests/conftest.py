"""Shared fixtures: a fast, fully-resolved interface problem.

The fast problem keeps the paper's edge-distance ratio (packet center 12.5
spectral widths above the cut-off) but uses a stronger coupling and wider
packet so designs and propagations run in seconds.  Session scope: designs
are reused across test modules.
"""

import warnings

import numpy as np
import pytest

import edgeqed as eq
from edgeqed import presets

OMEGA0 = 1.5e6
FAST_DETUNING = 4.0
FAST_SIGMA0 = 0.32
FAST_GAMMA = 1.6


class FastProblem:
    def __init__(self):
        self.omega1 = OMEGA0 + FAST_DETUNING
        self.model = eq.calibrated_model(FAST_GAMMA, self.omega1, eq.WaveguideModel(omega0=OMEGA0))
        self.node = eq.ThreeLevelNode(eps32=self.omega1, model=self.model)
        self.gamma = eq.markovian_rate(self.model, self.omega1)
        self.sigma0 = FAST_SIGMA0
        window = presets.design_window(self.sigma0, self.gamma)
        self.kgrid = presets.interface_kgrid(self.node, self.omega1, self.sigma0, window)
        self.tgrid = presets.interface_tgrid(self.node, self.kgrid, self.sigma0, self.omega1, window=window)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            self.F = eq.sech_wavepacket(self.omega1, self.sigma0, self.kgrid, self.model)


@pytest.fixture(scope="session")
def fast():
    return FastProblem()


@pytest.fixture(scope="session")
def fast_send_design(fast):
    return eq.design_sending_pulse(fast.F, fast.node, fast.tgrid)


@pytest.fixture(scope="session")
def fast_recv_design(fast):
    return eq.design_receiving_pulse(fast.F, fast.node, 0.0, fast.tgrid)


@pytest.fixture(scope="session")
def fast_roundtrip(fast, fast_send_design):
    return eq.propagate_sending(fast_send_design.pulse, fast.node, fast.kgrid, fast.tgrid, leak_rate=0.0)
