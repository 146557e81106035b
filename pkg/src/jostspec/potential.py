"""Real potentials supported on [0, 1].

Two representations are supported: piecewise-constant cells and
piecewise-cubic cells. Cubic coefficients are given in the local variable
``t = x - x_i`` of each cell, i.e. ``q(x) = c0 + c1*t + c2*t**2 + c3*t**3``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P

PIECEWISE_CONSTANT = "piecewise_constant"
PIECEWISE_POLY = "piecewise_poly"

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


class PotentialParseError(ValueError):
    """Raised for malformed potential input; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _pad(coeffs) -> np.ndarray:
    """Per-cell coefficient lists of differing length as a rectangular array."""
    if isinstance(coeffs, np.ndarray) or not all(isinstance(r, (list, tuple, np.ndarray)) for r in coeffs):
        return np.asarray(coeffs, dtype=float)
    rows = [np.asarray(r, dtype=float).reshape(-1) for r in coeffs]
    width = max((len(r) for r in rows), default=1)
    return np.array([np.pad(r, (0, width - len(r))) for r in rows], dtype=float)


class Potential:
    """Piecewise potential q on [0, 1], identically zero outside."""

    __slots__ = ("breakpoints", "coeffs", "kind")

    def __init__(self, breakpoints, coeffs, kind: str = PIECEWISE_POLY):
        bp = np.asarray(breakpoints, dtype=float)
        c = _pad(coeffs) if kind == PIECEWISE_POLY else np.asarray(coeffs, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise PotentialParseError("breakpoints", "need at least two breakpoints")
        if bp[0] != 0.0:
            raise PotentialParseError("breakpoints", "first breakpoint must be 0")
        if bp[-1] != 1.0:
            raise PotentialParseError("breakpoints", "last breakpoint must be 1")
        if not np.all(np.diff(bp) > 0):
            raise PotentialParseError("breakpoints", "must be strictly increasing")
        if kind == PIECEWISE_CONSTANT:
            c = c.reshape(-1)
            if c.size != bp.size - 1:
                raise PotentialParseError("values", "need one value per cell")
            c = np.column_stack([c, np.zeros((c.size, 3))])
        elif kind == PIECEWISE_POLY:
            if c.ndim == 1:
                c = c[:, None]
            if c.shape[0] != bp.size - 1 or c.shape[1] > 4:
                raise PotentialParseError("coeffs", "need one list of <= 4 coefficients per cell")
            c = np.column_stack([c, np.zeros((c.shape[0], 4 - c.shape[1]))])
        else:
            raise PotentialParseError("kind", f"unknown kind {kind!r}")
        if not np.all(np.isfinite(c)):
            field = "values" if kind == PIECEWISE_CONSTANT else "coeffs"
            raise PotentialParseError(field, "values must be finite")
        object.__setattr__(self, "breakpoints", _frozen(bp))
        object.__setattr__(self, "coeffs", _frozen(c))
        object.__setattr__(self, "kind", kind)

    def __reduce__(self):
        data = self.values if self.kind == PIECEWISE_CONSTANT else self.coeffs
        return (Potential, (np.array(self.breakpoints), np.array(data), self.kind))

    def __setattr__(self, name, value):
        raise AttributeError("Potential is immutable")

    # constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> "Potential":
        return cls([0.0, 1.0], [value], PIECEWISE_CONSTANT)

    @classmethod
    def piecewise_constant(cls, breakpoints, values) -> "Potential":
        return cls(breakpoints, values, PIECEWISE_CONSTANT)

    @classmethod
    def piecewise_poly(cls, breakpoints, coeffs) -> "Potential":
        return cls(breakpoints, coeffs, PIECEWISE_POLY)

    @classmethod
    def zero(cls) -> "Potential":
        return cls.constant(0.0)

    # basic properties -----------------------------------------------------

    @property
    def n_cells(self) -> int:
        return self.breakpoints.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def is_piecewise_constant(self) -> bool:
        return self.kind == PIECEWISE_CONSTANT or not np.any(self.coeffs[:, 1:])

    @property
    def values(self) -> np.ndarray:
        """Cell values (constant term of each cell)."""
        return self.coeffs[:, 0]

    def __repr__(self) -> str:
        if self.kind == PIECEWISE_CONSTANT:
            return f"Potential(breakpoints={self.breakpoints.tolist()}, values={self.values.tolist()})"
        return f"Potential(breakpoints={self.breakpoints.tolist()}, coeffs={self.coeffs.tolist()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Potential):
            return NotImplemented
        return (
            self.kind == other.kind
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.breakpoints.tobytes(), self.coeffs.tobytes()))

    # evaluation -----------------------------------------------------------

    def cell_index(self, x):
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        return np.clip(idx, 0, self.n_cells - 1)

    def __call__(self, x):
        return evaluate(self, x)

    def sup_negative_part(self) -> float:
        """max over [0, 1] of q_- = max(-q, 0)."""
        lo = math.inf
        for i in range(self.n_cells):
            lo = min(lo, _cell_min(self.coeffs[i], self.widths[i]))
        return max(-lo, 0.0)

    def l1_norm(self) -> float:
        return sum(_abs_integral(self.coeffs[i], self.widths[i]) for i in range(self.n_cells))

    def layering(self, layers: int = 1):
        """Layer widths and midpoint values of the layered approximation.

        Constant cells are represented exactly by a single layer; polynomial
        cells are split into ``layers`` equal sublayers sampled at midpoints.
        """
        h_all, v_all = [], []
        for i in range(self.n_cells):
            c, w = self.coeffs[i], self.widths[i]
            if not np.any(c[1:]):
                h_all.append(np.array([w]))
                v_all.append(np.array([c[0]]))
            else:
                hs = w / layers
                mids = (np.arange(layers) + 0.5) * hs
                h_all.append(np.full(layers, hs))
                v_all.append(P.polyval(mids, c))
        return np.concatenate(h_all), np.concatenate(v_all)

    # serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == PIECEWISE_CONSTANT:
            return {"kind": PIECEWISE_CONSTANT, "breakpoints": self.breakpoints.tolist(),
                    "values": self.values.tolist()}
        return {"kind": PIECEWISE_POLY, "breakpoints": self.breakpoints.tolist(),
                "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Potential":
        if not isinstance(d, dict):
            raise PotentialParseError("kind", "potential must be a JSON object")
        kind = d.get("kind")
        if kind not in (PIECEWISE_CONSTANT, PIECEWISE_POLY):
            raise PotentialParseError("kind", f"expected 'piecewise_constant' or 'piecewise_poly', got {kind!r}")
        if "breakpoints" not in d:
            raise PotentialParseError("breakpoints", "missing")
        field = "values" if kind == PIECEWISE_CONSTANT else "coeffs"
        if field not in d:
            raise PotentialParseError(field, "missing")
        try:
            bp = np.asarray(d["breakpoints"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise PotentialParseError("breakpoints", f"not a list of numbers ({exc})") from None
        try:
            data = _pad(d[field]) if kind == PIECEWISE_POLY else np.asarray(d[field], dtype=float)
        except (TypeError, ValueError) as exc:
            raise PotentialParseError(field, f"not numeric ({exc})") from None
        return cls(bp, data, kind)

    @classmethod
    def load(cls, path) -> "Potential":
        text = Path(path).read_text(encoding="utf-8")
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PotentialParseError("file", f"invalid JSON ({exc})") from None
        return cls.from_dict(d)


def evaluate(p: Potential, x):
    """q(x), zero outside [0, 1]; right limits at breakpoints, left limit at 1."""
    xa = np.asarray(x, dtype=float)
    idx = p.cell_index(xa)
    t = xa - p.breakpoints[idx]
    c = p.coeffs[idx]
    val = c[..., 0] + t * (c[..., 1] + t * (c[..., 2] + t * c[..., 3]))
    val = np.where((xa >= 0.0) & (xa <= 1.0), val, 0.0)
    if np.ndim(val) == 0:
        return float(val)
    return val


def shift(p: Potential, eps: float) -> Potential:
    """The potential q - eps on [0, 1] (still zero outside)."""
    c = np.array(p.coeffs)
    c[:, 0] -= eps
    if p.kind == PIECEWISE_CONSTANT:
        return Potential(p.breakpoints, c[:, 0], PIECEWISE_CONSTANT)
    return Potential(p.breakpoints, c, PIECEWISE_POLY)


# derived potentials ---------------------------------------------------------

EVEN = "even"
PERIODIC = "periodic"
SHIFT = "shift"


@dataclass(frozen=True)
class DerivedPotential:
    """A transform of a base potential, evaluated pointwise.

    ``even``: q(|x|) on [-1, 1]; ``periodic``: the 1-periodic continuation
    of q over [0, 2]; ``shift``: q - eps on [0, 1].
    """

    base: Potential
    transform: str
    eps: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.transform == EVEN:
            return evaluate(self.base, np.abs(x))
        if self.transform == PERIODIC:
            inside = (x >= 0.0) & (x <= 2.0)
            y = np.where(x > 1.0, x - 1.0, x)
            return np.where(inside, evaluate(self.base, y), 0.0)
        if self.transform == SHIFT:
            return evaluate(shift(self.base, self.eps), x)
        raise ValueError(f"unknown transform {self.transform!r}")

    @property
    def support(self) -> tuple[float, float]:
        return {EVEN: (-1.0, 1.0), PERIODIC: (0.0, 2.0), SHIFT: (0.0, 1.0)}[self.transform]


def even_extension(p: Potential) -> DerivedPotential:
    return DerivedPotential(p, EVEN)


def periodic_extension(p: Potential) -> DerivedPotential:
    return DerivedPotential(p, PERIODIC)


def staircase(p: Potential, layers: int = 256) -> Potential:
    """Piecewise-constant potential equal to the midpoint layering of ``p``.

    Its spectra are computed without any refinement error, which matters
    for quantities like periodic gaps that are sensitive to non-structured
    perturbations of the transfer matrix.
    """
    if p.is_piecewise_constant:
        return p
    h, v = p.layering(layers)
    bp = np.concatenate([[p.breakpoints[0]], p.breakpoints[0] + np.cumsum(h)])
    bp[-1] = p.breakpoints[-1]
    return Potential.piecewise_constant(bp, v)


def even_extension_rescaled(p: Potential) -> Potential:
    """4 q(|2s - 1|) on s in [0, 1].

    This is the even extension translated to [0, 2] and compressed to the
    unit interval; the line problem for q_e at momentum k maps to the line
    problem for the returned potential at momentum 2k.
    """
    bp = p.breakpoints
    left_bp = (1.0 - bp[::-1]) / 2.0
    right_bp = (1.0 + bp) / 2.0
    breakpoints = np.concatenate([left_bp[:-1], right_bp])
    right = []
    left = []
    scale = np.array([1.0, 2.0, 4.0, 8.0])
    for i in range(p.n_cells):
        c = p.coeffs[i]
        right.append(4.0 * c * scale)
        # on the mirrored cell, local variable u maps to t = h_i - 2u
        h = p.widths[i]
        poly = np.zeros(1)
        lin = np.array([h, -2.0])
        acc = np.array([1.0])
        for j in range(4):
            poly = P.polyadd(poly, c[j] * acc)
            acc = P.polymul(acc, lin)
        poly = np.concatenate([poly, np.zeros(4 - poly.size)])[:4]
        left.append(4.0 * poly)
    coeffs = np.array(left[::-1] + right)
    if p.kind == PIECEWISE_CONSTANT:
        return Potential(breakpoints, coeffs[:, 0], PIECEWISE_CONSTANT)
    return Potential(breakpoints, coeffs, PIECEWISE_POLY)


# functionals ------------------------------------------------------------------


@dataclass(frozen=True)
class Functionals:
    int_q: float
    int_xq_minus: float
    int_q_minus: float
    int_sqrt_q_minus: float
    l2_norm: float | None
    is_monotone: bool
    is_nonpositive: bool
    # -q_- nondecreasing on [0, 1]; with q = 0 beyond x = 1 this is the
    # monotone attractive profile the Calogero-Cohn bound asks for
    minus_part_nonincreasing: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _real_roots_in(c, a: float, b: float) -> list[float]:
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    if c.size <= 1:
        return []
    roots = P.polyroots(c)
    out = []
    for r in roots:
        if abs(r.imag) <= 1e-12 * max(1.0, abs(r.real)):
            x = r.real
            if a < x < b:
                out.append(float(x))
    return sorted(out)


def _cell_min(c, w: float) -> float:
    pts = [0.0, w] + _real_roots_in(P.polyder(c), 0.0, w)
    return float(min(P.polyval(np.array(pts), c)))


def _sign_pieces(c, w: float):
    """Split [0, w] at real roots of the cell polynomial."""
    cuts = [0.0] + _real_roots_in(c, 0.0, w) + [w]
    return list(zip(cuts[:-1], cuts[1:]))


def _abs_integral(c, w: float) -> float:
    ci = P.polyint(c)
    total = 0.0
    for a, b in _sign_pieces(c, w):
        total += abs(P.polyval(b, ci) - P.polyval(a, ci))
    return total


def _gl(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    return half * float(np.dot(_GL_WEIGHTS, f(0.5 * (a + b) + half * _GL_NODES)))


def adaptive_gauss(f, a: float, b: float, tol: float = 1e-12, depth: int = 0) -> float:
    """64-point Gauss-Legendre with recursive bisection until halves agree."""
    whole = _gl(f, a, b)
    m = 0.5 * (a + b)
    left, right = _gl(f, a, m), _gl(f, m, b)
    if abs(left + right - whole) <= tol or depth >= 50:
        return left + right
    return adaptive_gauss(f, a, m, tol / 2, depth + 1) + adaptive_gauss(f, m, b, tol / 2, depth + 1)


def _monotone_flags(p: Potential) -> tuple[bool, bool, bool]:
    """(nondecreasing, nonincreasing, q_- nonincreasing), exact on the representation."""
    nondec = noninc = True
    g_ok = True  # g = min(q, 0) nondecreasing
    prev_right = None
    prev_g = None
    for i in range(p.n_cells):
        c, w = p.coeffs[i], p.widths[i]
        dc = P.polyder(c)
        left_val = float(c[0])
        if prev_right is not None:
            if left_val < prev_right:
                nondec = False
            if left_val > prev_right:
                noninc = False
            if min(left_val, 0.0) < prev_g:
                g_ok = False
        if np.any(dc):
            crit = [0.0] + _real_roots_in(dc, 0.0, w) + [w]
            cuts = sorted(set(crit + _real_roots_in(c, 0.0, w)))
            for a, b in zip(cuts[:-1], cuts[1:]):
                m = 0.5 * (a + b)
                slope = P.polyval(m, dc)
                if slope < 0:
                    nondec = False
                    if P.polyval(m, c) < 0:
                        g_ok = False
                elif slope > 0:
                    noninc = False
        prev_right = float(P.polyval(w, c))
        prev_g = min(prev_right, 0.0)
    return nondec, noninc, g_ok


def functionals(p: Potential) -> Functionals:
    int_q = int_xq_minus = int_q_minus = int_sqrt = l2sq = 0.0
    nonpositive = True
    for i in range(p.n_cells):
        c, w, x0 = p.coeffs[i], p.widths[i], p.breakpoints[i]
        ci = P.polyint(c)
        int_q += P.polyval(w, ci)
        sq = P.polymul(c, c)
        l2sq += P.polyval(w, P.polyint(sq))
        if not np.any(c[1:]):
            v = c[0]
            if v < 0:
                int_q_minus += -v * w
                int_xq_minus += -v * (x0 + 0.5 * w) * w
                int_sqrt += math.sqrt(-v) * w
            elif v > 0:
                nonpositive = False
            continue
        # x q(x) in the local variable: (x0 + t) q
        xc = P.polymul([x0, 1.0], c)
        xci = P.polyint(xc)
        for a, b in _sign_pieces(c, w):
            m = 0.5 * (a + b)
            if P.polyval(m, c) >= 0:
                if P.polyval(m, c) > 0:
                    nonpositive = False
                continue
            int_q_minus += -(P.polyval(b, ci) - P.polyval(a, ci))
            int_xq_minus += -(P.polyval(b, xci) - P.polyval(a, xci))
            int_sqrt += adaptive_gauss(
                lambda t, c=c: np.sqrt(np.maximum(-P.polyval(t, c), 0.0)), a, b
            )
    nondec, noninc, g_ok = _monotone_flags(p)
    return Functionals(
        int_q=float(int_q),
        int_xq_minus=float(int_xq_minus),
        int_q_minus=float(int_q_minus),
        int_sqrt_q_minus=float(int_sqrt),
        l2_norm=float(math.sqrt(max(l2sq, 0.0))),
        is_monotone=nondec or noninc,
        is_nonpositive=nonpositive,
        minus_part_nonincreasing=g_ok,
    )
