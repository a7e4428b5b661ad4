"""Numerical checks of quantum nonlocality: EPR pairs, Bell/CHSH, GHZ, and Hardy interferometers."""

from . import bell, correlations, density, ghz, interferometer, linalg, states

__all__ = ["bell", "correlations", "density", "ghz", "interferometer", "linalg", "states"]
__version__ = "0.1.0"
