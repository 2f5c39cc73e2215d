"""Hermite analysis on Gaussian space: Ornstein-Uhlenbeck propagators,
Fourier-Hermite restriction and extension, Schatten norms, and Strichartz
experiments for orthonormal systems."""

__version__ = "0.1.0"

from .errors import OUStrichartzError  # noqa: E402,F401
