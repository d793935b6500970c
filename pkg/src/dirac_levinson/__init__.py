"""Phase shifts, bound states and spectral flow for the 1D Dirac equation."""

__version__ = "0.1.0"
