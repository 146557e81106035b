"""Finite-difference cross-checks.

Second-order three-point stencil on a uniform grid with cell-averaged
potential. Nothing here touches the transfer-matrix code: the eigenvalues
come from LAPACK Sturm bisection (tridiagonal) or from multisection on
exact inertia counts (periodic, where a corner entry closes the cycle),
so agreement with the main solvers is independent evidence.

Grid conventions, h = spacing, nodes x_i = a + i h:
    Dirichlet end    node on the boundary is dropped (y = 0)
    Neumann end      boundary node kept, ghost-point reflection, row
                     symmetrised by scaling that unknown by sqrt(2)
    periodic [0, 2]  2/h nodes on a cycle
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import report
from .potential import Potential

BOUNDARIES = ("dirichlet", "neumann", "mixed01", "mixed10", "periodic", "box-dirichlet", "box-neumann", "box-line")
DEFAULT_N = 8192
DEFAULT_R = 30.0
SHALLOW_R = 120.0
SHALLOW_ENERGY = 0.05
ORDER_RANGE = (1.7, 2.3)


def _antiderivative(p: Potential):
    """x -> int_0^x q (q extended by zero), vectorised."""
    bp = np.asarray(p.breakpoints, dtype=float)
    c = np.asarray(p.coeffs, dtype=float)
    w = np.diff(bp)
    powers = np.arange(1, c.shape[1] + 1)
    full = (c * w[:, None] ** powers / powers).sum(axis=1)
    cum = np.concatenate([[0.0], np.cumsum(full)])

    def F(x):
        x = np.clip(np.asarray(x, dtype=float), bp[0], bp[-1])
        i = np.clip(np.searchsorted(bp, x, side="right") - 1, 0, len(w) - 1)
        t = x - bp[i]
        part = (c[i] * t[:, None] ** powers / powers).sum(axis=1)
        return cum[i] + part

    return F


def _cell_average(F, lo, hi):
    return (F(hi) - F(lo)) / (hi - lo)


@dataclass
class DiscretizedOperator:
    """Symmetric FD matrix: tridiagonal (diag, off), plus a corner entry when periodic."""

    n: int
    domain: tuple[float, float]
    boundary: str
    h: float
    diag: np.ndarray
    off: np.ndarray
    corner: float | None = None  # periodic: entry coupling the first and last node

    @property
    def size(self) -> int:
        return len(self.diag)


def _points_per_unit(n: int, length: float, align: int = 8) -> int:
    m = math.ceil(n / length)
    return align * math.ceil(m / align)


def discretize(p: Potential, boundary: str, n: int = DEFAULT_N, R: float = DEFAULT_R) -> DiscretizedOperator:
    """Build the FD operator. ``n`` is the minimum number of grid intervals.

    The spacing is rounded down so that 1/h is a multiple of 8, which puts
    nodes on equispaced 8-cell breakpoints.
    """
    if boundary not in BOUNDARIES:
        raise ValueError(f"unknown boundary {boundary!r}")
    if n < 64:
        raise ValueError("n must be >= 64")
    F = _antiderivative(p)
    if boundary == "periodic":
        return _periodic(F, n)
    if boundary == "box-line":
        a, b = -R, 1.0 + R
        left, right = "D", "D"
    elif boundary == "box-dirichlet":
        a, b, left, right = 0.0, R, "D", "D"
    elif boundary == "box-neumann":
        a, b, left, right = 0.0, R, "N", "D"
    else:
        a, b = 0.0, 1.0
        left, right = {"dirichlet": ("D", "D"), "neumann": ("N", "N"),
                       "mixed01": ("D", "N"), "mixed10": ("N", "D")}[boundary]
    m = _points_per_unit(n, b - a)
    steps = int(round((b - a) * m))
    h = (b - a) / steps
    x = a + h * np.arange(steps + 1)
    lo = np.maximum(x - h / 2, a)
    hi = np.minimum(x + h / 2, b)
    q = _cell_average(F, lo, hi)
    diag = 2.0 / h**2 + q
    off = np.full(steps, -1.0 / h**2)
    s2 = math.sqrt(2.0)
    if left == "N":
        off[0] *= s2
    if right == "N":
        off[-1] *= s2
    keep = slice(1 if left == "D" else 0, steps if right == "D" else steps + 1)
    d = diag[keep]
    e = off[keep.start: keep.start + len(d) - 1]
    return DiscretizedOperator(steps, (a, b), boundary, h, d, e)


def _periodic(F, n: int) -> DiscretizedOperator:
    m = _points_per_unit(n, 1.0)
    h = 1.0 / m
    M = 2 * m  # nodes on [0, 2), neighbours on a cycle
    x = h * np.arange(M)
    xm = np.mod(x, 1.0)
    # average over [x - h/2, x + h/2] of the 1-periodic potential
    lo, hi = xm - h / 2, xm + h / 2
    total = F(np.array([1.0]))[0]
    Flo = np.where(lo < 0, F(lo + 1.0) - total, F(np.maximum(lo, 0.0)))
    Fhi = np.where(hi > 1, F(hi - 1.0) + total, F(np.minimum(hi, 1.0)))
    q = (Fhi - Flo) / h
    return DiscretizedOperator(M, (0.0, 2.0), "periodic", h, 2.0 / h**2 + q,
                               np.full(M - 1, -1.0 / h**2), corner=-1.0 / h**2)


def _counts(op: DiscretizedOperator, lams: np.ndarray) -> np.ndarray:
    """Number of eigenvalues below each lam: negative pivots of LDL^T of A - lam.

    For the cyclic matrix, eliminating in natural order only fills the last
    column; its entries g_i are carried along and their Schur contributions
    summed into the last pivot. Vectorised over lam.
    """
    lams = np.asarray(lams, dtype=float)
    d, e = op.diag, op.off
    tiny = np.finfo(float).tiny
    M = len(d)
    cyclic = op.corner is not None
    last = M - 1 if cyclic else M
    p = d[0] - lams
    p[p == 0.0] = -tiny
    neg = (p < 0).astype(int)
    if cyclic:
        g = np.full_like(lams, op.corner)
        acc = np.zeros_like(lams)
    for i in range(1, last):
        if cyclic:
            acc += g * g / p
            g = -e[i - 1] * g / p
            if i == M - 2:
                g = g + e[M - 2]
        p = (d[i] - lams) - e[i - 1] ** 2 / p
        p[p == 0.0] = -tiny
        neg += p < 0
    if cyclic:
        acc += g * g / p
        p = d[M - 1] - lams - acc
        neg += p < 0
    return neg


def _multisection(op: DiscretizedOperator, n_low: int, points: int = 64) -> np.ndarray:
    """Lowest eigenvalues by simultaneous bisection on exact inertia counts."""
    r = np.abs(op.off).max(initial=0.0)
    c = abs(op.corner or 0.0)
    a0 = float(op.diag.min() - 2 * r - c - 1.0)
    b0 = float(op.diag.min()) + 1.0
    while _counts(op, np.array([b0]))[0] < n_low:
        b0 = b0 + 2 * (b0 - a0)
    a = np.full(n_low, a0)
    b = np.full(n_low, b0)
    target = np.arange(n_low)
    tol = 2 * np.finfo(float).eps * (abs(op.diag).max() + 2 * r + c)
    frac = np.arange(1, points + 1) / (points + 1)
    while np.any(b - a > tol):
        grid = a[:, None] + (b - a)[:, None] * frac[None, :]
        cnt = _counts(op, grid.ravel()).reshape(grid.shape)
        above = cnt > target[:, None]          # lam is past eigenvalue k
        # new b: first grid point past k; new a: last grid point not past k
        first = np.where(above.any(axis=1), above.argmax(axis=1), points)
        nb = np.where(first < points, grid[np.arange(n_low), np.minimum(first, points - 1)], b)
        na = np.where(first > 0, grid[np.arange(n_low), np.maximum(first - 1, 0)], a)
        if np.all(nb - na >= b - a):
            break
        a, b = na, nb
    return 0.5 * (a + b)


def oracle_spectrum(op: DiscretizedOperator, n_low: int) -> np.ndarray:
    """Lowest ``n_low`` eigenvalues, increasing."""
    if n_low > max(op.n // 8, 1):
        raise ValueError("n_low must be <= N/8")
    if op.corner is not None:
        return _multisection(op, n_low)
    return eigh_tridiagonal(op.diag, op.off, eigvals_only=True, select="i",
                            select_range=(0, n_low - 1), lapack_driver="stebz")


def sturm_count(op: DiscretizedOperator, lam: float) -> int:
    """Eigenvalues of the FD matrix below lam (Sylvester inertia)."""
    return int(_counts(op, np.array([float(lam)]))[0])


def negative_box_spectrum(p: Potential, boundary: str, count: int, n: int = DEFAULT_N,
                          R: float = DEFAULT_R) -> np.ndarray:
    """Negative eigenvalues of a box problem, at most ``count`` of them."""
    op = discretize(p, boundary, n, R)
    k = max(count, 1)
    vals = oracle_spectrum(op, k)
    return vals[vals < 0][:count]


# comparison with the main solvers ----------------------------------------------

INTERVAL_BOUNDARIES = ("dirichlet", "neumann", "mixed01", "mixed10", "periodic")
BOX_FOR_CASE = {"T": "box-dirichlet", "T~": "box-neumann", "Tline": "box-line"}


def roundoff_floor(h: float) -> float:
    """Bisection on a matrix with entries ~4/h^2 cannot resolve eigenvalues below this."""
    return 4 * np.finfo(float).eps * 4.0 / h**2


def _order(err_coarse: float, err_fine: float) -> float:
    if err_fine == 0.0 or err_coarse == 0.0:
        return math.nan
    return math.log2(abs(err_coarse) / abs(err_fine))


@dataclass
class Comparison:
    label: str
    reference: float
    coarse: float
    fine: float
    tolerance: float
    floor: float = 0.0  # roundoff level of the fine FD eigenvalue

    @property
    def deviation(self) -> float:
        return self.fine - self.reference

    @property
    def order(self) -> float:
        return _order(self.coarse - self.reference, self.fine - self.reference)


def _entries(comps: list[Comparison], theorem: str = "oracle") -> list[report.ReportEntry]:
    out = []
    for c in comps:
        out.append(report.nonstrict(theorem, f"|{c.label} - FD| <= {c.tolerance:g}",
                                    abs(c.deviation), c.tolerance, 0.0))
        o = c.order
        stmt = f"FD convergence order for {c.label} in [{ORDER_RANGE[0]}, {ORDER_RANGE[1]}]"
        if abs(c.deviation) < c.floor or not math.isfinite(o):
            out.append(report.ReportEntry(theorem, stmt, o, None, None, report.DEGENERATE, 0.0,
                                          "error at roundoff level, order undefined"))
        else:
            ok = ORDER_RANGE[0] <= o <= ORDER_RANGE[1]
            out.append(report.ReportEntry(theorem, stmt, o, None, min(o - ORDER_RANGE[0], ORDER_RANGE[1] - o),
                                          report.PASS if ok else report.FAIL, 0.0))
    return out


def compare_interval(p: Potential, reference: dict[str, list[float]], n: int = DEFAULT_N,
                     tolerance: float = 2e-3, n_low: int = 5) -> list[Comparison]:
    """``reference`` maps each boundary in INTERVAL_BOUNDARIES to its lowest eigenvalues."""
    out = []
    for b in INTERVAL_BOUNDARIES:
        ref = list(reference[b])[:n_low]
        coarse = oracle_spectrum(discretize(p, b, n // 2), len(ref))
        op = discretize(p, b, n)
        fine = oracle_spectrum(op, len(ref))
        fl = roundoff_floor(op.h)
        out += [Comparison(f"{b}[{i}]", r, c, f, tolerance, fl) for i, (r, c, f) in enumerate(zip(ref, coarse, fine))]
    return out


def compare_boxes(p: Potential, reference: dict[str, list[float]], n: int = DEFAULT_N,
                  tolerance: float = 2e-3, n_low: int = 5, R: float = DEFAULT_R):
    """Half-line and line bound states against Dirichlet-walled boxes.

    Returns (comparisons, count mismatches). States with |E| below
    SHALLOW_ENERGY use the larger box and twice the tolerance.
    """
    comps, mismatches = [], []
    for case, ref in reference.items():
        ref = list(ref)[:n_low]
        if not ref:
            continue
        shallow = min(abs(e) for e in ref) < SHALLOW_ENERGY
        RR = SHALLOW_R if shallow else R
        tol = 2 * tolerance if shallow else tolerance
        b = BOX_FOR_CASE[case]
        scale = RR / R
        coarse = negative_box_spectrum(p, b, len(ref), int(n * scale) // 2, RR)
        fine = negative_box_spectrum(p, b, len(ref), int(n * scale), RR)
        if len(fine) != len(ref) or len(coarse) != len(ref):
            mismatches.append((case, len(ref), len(fine)))
            continue
        fl = roundoff_floor(RR / (int(n * scale)))
        comps += [Comparison(f"{case}[{i}]", r, c, f, tol, fl) for i, (r, c, f) in enumerate(zip(ref, coarse, fine))]
    return comps, mismatches


def cross_validate(p: Potential, tolerance: float = 2e-3, n: int = DEFAULT_N, n_low: int = 5,
                   interval_reference=None, box_reference=None) -> list[report.ReportEntry]:
    """Oracle entries for every family; references computed here unless given."""
    from .interval import DIRICHLET, MIXED01, MIXED10, NEUMANN, interval_eigenvalues, periodic_spectrum
    from .scattering import halfline_dirichlet_spectrum, halfline_neumann_spectrum, line_spectrum

    if interval_reference is None:
        interval_reference = {
            "dirichlet": interval_eigenvalues(p, DIRICHLET, n_low).eigenvalues(),
            "neumann": interval_eigenvalues(p, NEUMANN, n_low).eigenvalues(),
            "mixed01": interval_eigenvalues(p, MIXED01, n_low).eigenvalues(),
            "mixed10": interval_eigenvalues(p, MIXED10, n_low).eigenvalues(),
            "periodic": sorted(periodic_spectrum(p, n_low).eigenvalues())[:n_low],
        }
    if box_reference is None:
        T, Tn = halfline_dirichlet_spectrum(p), halfline_neumann_spectrum(p)
        box_reference = {"T": T.eigenvalues, "T~": Tn.eigenvalues,
                         "Tline": line_spectrum(p, T, Tn).eigenvalues}
    comps = compare_interval(p, interval_reference, n, tolerance, n_low)
    box, mismatches = compare_boxes(p, box_reference, n, tolerance, n_low)
    out = _entries(comps + box)
    for case, want, got in mismatches:
        out.append(report.equal("oracle", f"{case}: number of negative box eigenvalues", got, want))
    return out
