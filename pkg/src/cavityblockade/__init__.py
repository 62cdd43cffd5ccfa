"""Steady-state photon statistics of a two-atom Raman-EIT cavity-QED system."""
__version__ = "0.1.0"
