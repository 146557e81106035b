"""Seeded test potentials."""
from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .potential import Potential

N_CELLS = 8
LOW, HIGH = -30.0, 20.0


def _grid(n: int = N_CELLS) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 1)


def random_potential(rng: np.random.Generator, n_cells: int = N_CELLS) -> Potential:
    """Piecewise constant on equal cells, values uniform in [LOW, HIGH]."""
    return Potential.piecewise_constant(_grid(n_cells), rng.uniform(LOW, HIGH, n_cells))


def random_corpus(seed: int, count: int, n_cells: int = N_CELLS) -> list[Potential]:
    rng = np.random.default_rng(seed)
    return [random_potential(rng, n_cells) for _ in range(count)]


def monotone_corpus(seed: int, count: int, n_cells: int = N_CELLS) -> list[Potential]:
    """Monotone staircases with the same value range; direction alternates."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        v = np.sort(rng.uniform(LOW, HIGH, n_cells))
        if i % 2:
            v = v[::-1]
        out.append(Potential.piecewise_constant(_grid(n_cells), v))
    return out


def smooth_mean_zero_corpus(seed: int, count: int, n_cells: int = N_CELLS, modes: int = 4) -> list[Potential]:
    """C^1 piecewise cubics interpolating a random cosine series, shifted to mean zero.

    The cosine series sum a_j cos(2 pi j x) is smooth as a 1-periodic
    function; Hermite interpolation keeps q(0) = q(1) and q'(0) = q'(1) = 0,
    so the periodic gaps decay fast enough for a short truncation of gamma.
    """
    rng = np.random.default_rng(seed)
    x = _grid(n_cells)
    j = np.arange(1, modes + 1)
    out = []
    for _ in range(count):
        a = rng.normal(0.0, 8.0, modes) / j
        f = np.cos(2 * np.pi * np.outer(x, j)) @ a
        df = -(2 * np.pi * j * np.sin(2 * np.pi * np.outer(x, j))) @ a
        spline = CubicHermiteSpline(x, f, df)
        # PPoly stores coefficients highest power first in t = x - x_i
        coeffs = spline.c[::-1].T.copy()
        mean = spline.integrate(0.0, 1.0)
        coeffs[:, 0] -= mean
        out.append(Potential.piecewise_poly(x, coeffs))
    return out
