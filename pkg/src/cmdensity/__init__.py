"""One-level densities for the Hecke characters of the CM curves y^2 = x^3 - d x."""

__version__ = "0.1.0"
