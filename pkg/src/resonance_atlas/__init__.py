"""Bifurcation atlas of the detuned symmetric 1:1 resonance."""
__version__ = "0.1.0"
