"""Unit conventions.

Energies and rates are in meV, time in ps, length in um.  Every conversion
between an energy and an inverse time goes through HBAR_MEV_PS; dynamical
phases are exp(-i*omega*t/hbar) and spatial phases are exp(i*k*x/hbar).
"""

from typing import Final

# Reduced Planck constant in meV*ps.
HBAR_MEV_PS: Final[float] = 0.6582119569

# Vacuum light speed in um/ps (default waveguide speed parameter c/n with n=1).
C_UM_PER_PS: Final[float] = 299792.458
