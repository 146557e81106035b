"""Fundamental solutions at x = 1 via layered exact propagators.

On a layer of width h where the potential is frozen at v, the solution
vector (y, y') is advanced by

    [[C, h S], [-(lam - v) h S, C]],   C = cos(w h), S = sin(w h) / (w h),

with w**2 = lam - v. Both C and S are even in w, so they are entire
functions of z = (lam - v) h**2 and no square-root branch enters.
The product over all layers, applied to the identity, gives

    [[theta(1), phi(1)], [theta'(1), phi'(1)]].

Piecewise-constant potentials are propagated exactly with one layer per
cell. Polynomial cells use midpoint sampling (second order, even error
expansion) followed by two Richardson steps.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .potential import Potential

DEFAULT_LAYERS = 64
MAX_LAYERS = 2**14
CONVERGENCE_TOL = 1e-10
_SERIES_CUTOFF = 1e-4
# numpy pays off once there are more layers than this
_SCALAR_LAYER_LIMIT = 48


class ConvergenceError(RuntimeError):
    pass


def _cs_real(z: float) -> tuple[float, float]:
    if abs(z) < _SERIES_CUTOFF:
        c = 1.0 + z * (-1 / 2 + z * (1 / 24 + z * (-1 / 720 + z / 40320)))
        s = 1.0 + z * (-1 / 6 + z * (1 / 120 + z * (-1 / 5040 + z / 362880)))
        return c, s
    if z > 0:
        w = math.sqrt(z)
        return math.cos(w), math.sin(w) / w
    w = math.sqrt(-z)
    return math.cosh(w), math.sinh(w) / w


def _cs_complex(z: complex) -> tuple[complex, complex]:
    if abs(z) < _SERIES_CUTOFF:
        c = 1.0 + z * (-1 / 2 + z * (1 / 24 + z * (-1 / 720 + z / 40320)))
        s = 1.0 + z * (-1 / 6 + z * (1 / 120 + z * (-1 / 5040 + z / 362880)))
        return c, s
    w = cmath.sqrt(z)
    return cmath.cos(w), cmath.sin(w) / w


def _cs_array(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    small = np.abs(z) < _SERIES_CUTOFF
    zs = np.where(small, 1.0, z)
    w = np.sqrt(zs)
    c = np.cos(w)
    s = np.sin(w) / w
    if np.any(small):
        zz = np.where(small, z, 0.0)
        cser = 1.0 + zz * (-1 / 2 + zz * (1 / 24 + zz * (-1 / 720 + zz / 40320)))
        sser = 1.0 + zz * (-1 / 6 + zz * (1 / 120 + zz * (-1 / 5040 + zz / 362880)))
        c = np.where(small, cser, c)
        s = np.where(small, sser, s)
    return c, s


@lru_cache(maxsize=512)
def _layers(p: Potential, layers: int):
    h, v = p.layering(layers)
    return h, v, tuple(zip(h.tolist(), v.tolist()))


def _propagate_scalar(pairs, lam):
    """Product of layer propagators for one scalar lam (real or complex)."""
    real = not isinstance(lam, complex)
    cs = _cs_real if real else _cs_complex
    a, b, c, d = 1.0, 0.0, 0.0, 1.0  # [[theta, phi], [theta', phi']]
    for h, v in pairs:
        e = lam - v
        C, S = cs(e * h * h)
        hs = h * S
        ms = -e * hs
        a, b, c, d = C * a + hs * c, C * b + hs * d, ms * a + C * c, ms * b + C * d
    return a, b, c, d


def _propagate_array(h: np.ndarray, v: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Fundamental matrices, shape lam.shape + (2, 2), complex."""
    lam = np.asarray(lam, dtype=complex)
    shape = lam.shape
    lam = lam.reshape(-1, 1)
    e = lam - v[None, :]
    C, S = _cs_array(e * (h * h)[None, :])
    hs = h[None, :] * S
    m = np.empty(e.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = C
    m[..., 0, 1] = hs
    m[..., 1, 0] = -e * hs
    m[..., 1, 1] = C
    # pairwise reduction, later layers multiply from the left
    while m.shape[1] > 1:
        if m.shape[1] % 2:
            eye = np.broadcast_to(np.eye(2, dtype=complex), (m.shape[0], 1, 2, 2))
            m = np.concatenate([m, eye], axis=1)
        m = m[:, 1::2] @ m[:, 0::2]
    return m[:, 0].reshape(shape + (2, 2))


def _raw(p: Potential, lam, layers: int):
    h, v, pairs = _layers(p, layers)
    if np.ndim(lam) == 0 and len(pairs) <= _SCALAR_LAYER_LIMIT:
        lam = complex(lam) if isinstance(lam, (complex, np.complexfloating)) else float(lam)
        a, b, c, d = _propagate_scalar(pairs, lam)
        return np.array([[a, b], [c, d]])
    return _propagate_array(h, v, np.asarray(lam))


def _richardson(a1, a2, a4, a8):
    r1 = (4 * a2 - a1) / 3, (4 * a4 - a2) / 3, (4 * a8 - a4) / 3
    return (16 * r1[1] - r1[0]) / 15, (16 * r1[2] - r1[1]) / 15


def _converged(p: Potential, lam, layers: int, tol: float = CONVERGENCE_TOL):
    L = layers
    vals = [_raw(p, lam, L * 2**j) for j in range(4)]
    while True:
        coarse, fine = _richardson(*vals)
        if np.all(np.abs(fine - coarse) <= tol * (1.0 + np.abs(fine))):
            return fine, L * 8
        L *= 2
        if L * 8 > MAX_LAYERS:
            raise ConvergenceError(
                f"transfer matrix not converged at lambda={lam!r} with {L * 4} layers per cell"
            )
        vals = vals[1:] + [_raw(p, lam, L * 8)]


def _matrix(p: Potential, lam, layers: int | None):
    if p.is_piecewise_constant:
        return _raw(p, lam, 1), 1
    if layers is not None:
        return _raw(p, lam, layers), layers
    return _converged(p, lam, DEFAULT_LAYERS)


@dataclass(frozen=True)
class TransferMatrix:
    """[[theta(1), phi(1)], [theta'(1), phi'(1)]] at spectral parameter ``lam``."""

    entries: np.ndarray
    lam: complex
    layer_count: int

    @property
    def theta(self):
        return self.entries[0, 0]

    @property
    def phi(self):
        return self.entries[0, 1]

    @property
    def dtheta(self):
        return self.entries[1, 0]

    @property
    def dphi(self):
        return self.entries[1, 1]

    @property
    def det(self):
        return self.theta * self.dphi - self.dtheta * self.phi

    def det_error(self) -> float:
        """|det - 1| relative to the size of the two products."""
        scale = max(1.0, abs(self.theta * self.dphi) + abs(self.dtheta * self.phi))
        return float(abs(self.det - 1.0) / scale)

    @property
    def lyapunov(self):
        return 0.5 * (self.dphi + self.theta)


def _check_lam(lam):
    if not np.all(np.isfinite(np.asarray(lam, dtype=complex))):
        raise ValueError(f"spectral parameter must be finite, got {lam!r}")


def fundamental_matrix(p: Potential, lam, layers: int | None = None) -> TransferMatrix:
    """Fundamental matrix at x = 1.

    With ``layers=None`` polynomial cells are refined until the
    Richardson-extrapolated values settle; an explicit ``layers`` gives the
    plain midpoint product at that resolution.
    """
    _check_lam(lam)
    if layers is not None and layers < 1:
        raise ValueError("layers must be >= 1")
    m, used = _matrix(p, lam, layers)
    return TransferMatrix(entries=m, lam=lam, layer_count=used)


def entries(p: Potential, lam):
    """(theta, phi, theta', phi') at x = 1; floats for real scalar lam.

    Array input returns four arrays of the same shape.
    """
    m, _ = _matrix(p, lam, None)
    if m.ndim == 2:
        if isinstance(lam, (float, int, np.floating, np.integer)):
            return float(m[0, 0].real), float(m[0, 1].real), float(m[1, 0].real), float(m[1, 1].real)
        return complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])
    return m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]


def lyapunov(p: Potential, lam):
    """Delta(lam) = (phi'(1) + theta(1)) / 2."""
    _check_lam(lam)
    th, _, _, dph = entries(p, lam)
    return 0.5 * (th + dph)


@dataclass(frozen=True)
class AsymptoticRow:
    lam: float
    phi: float
    dphi: float
    theta: float
    dtheta: float


def asymptotic_residuals(p: Potential, lambda_grid) -> list[AsymptoticRow]:
    """Scaled deviations from the free fundamental solutions on real lam >= 100.

    Columns: |phi - sin r / r| |lam|, |phi' - cos r| |lam|^(1/2),
    |theta - cos r| |lam|^(1/2), |theta' + r sin r|, with r = sqrt(lam).
    """
    rows = []
    for lam in lambda_grid:
        lam = float(lam)
        if lam < 100:
            raise ValueError("asymptotic residuals need lam >= 100")
        th, ph, dth, dph = entries(p, lam)
        r = math.sqrt(lam)
        rows.append(AsymptoticRow(
            lam=lam,
            phi=abs(ph - math.sin(r) / r) * lam,
            dphi=abs(dph - math.cos(r)) * r,
            theta=abs(th - math.cos(r)) * r,
            dtheta=abs(dth + r * math.sin(r)),
        ))
    return rows


# Pruefer counting ------------------------------------------------------------

PHI_START = (0.0, 1.0)
THETA_START = (1.0, 0.0)


def prufer_state(p: Potential, lam: float, start=PHI_START, layers: int = DEFAULT_LAYERS):
    """Zeros of y(., lam) in (0, 1] and the angle atan2(y, y') mod pi at x = 1.

    The total Pruefer angle at x = 1 is ``zeros * pi + alpha``; it is
    strictly increasing in lam. Exact for the layered potential.
    """
    lam = float(lam)
    _, _, pairs = _layers(p, layers)
    y, yp = start
    zeros = 0
    for h, v in pairs:
        e = lam - v
        C, S = _cs_real(e * h * h)
        y1 = C * y + h * S * yp
        yp1 = -e * h * S * y + C * yp
        if e > 0:
            w = math.sqrt(e)
            phi0 = math.atan2(w * y, yp)
            f = (phi0 + w * h) / math.pi
            n = math.floor(f) - math.floor(phi0 / math.pi)
            if y != 0.0 and y1 != 0.0 and ((n % 2 == 0) != (y * y1 > 0)):
                n += 1 if f - math.floor(f) < 0.5 else -1
            zeros += max(n, 0)
        elif y != 0.0 and y * y1 <= 0.0:
            zeros += 1
        scale = max(abs(y1), abs(yp1))
        y, yp = y1 / scale, yp1 / scale
    alpha = math.atan2(y, yp) % math.pi
    return zeros, alpha
