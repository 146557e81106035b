"""Spectral toolkit for Schrodinger operators with potentials supported on [0, 1]."""
