"""Zeros of the Jost function in the lower half plane.

All work is done on the entire function F(k) = e^{-ik} psi(k), which has
the same zeros as psi. Zero counts come from the winding of F along a
rectangle boundary; a quadtree splits rectangles until each holds one
zero, which Newton then polishes. On the negative imaginary axis
k = -i s, F(-i s) = phi'(1, -s^2) - s phi(1, -s^2) is real, so axis
zeros are also found by a one-dimensional sign scan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import report
from .interval import DIRICHLET, MIXED01, interval_eigenvalues
from .potential import Potential
from .scattering import axis_dirichlet, halfline_dirichlet_spectrum, psi_scaled

DEFAULT_RECT = (-10.0, 10.0, -6.0, 0.0)
TOP_OFFSET = 1e-6          # keeps the top edge off a possible zero at k = 0
MIN_LEAF = 1e-6
GUARD = 0.25
MAX_STEP = 0.3             # radians of phase change tolerated between samples
AXIS_TOL = 1e-8
SPLITS = (0.4913, 0.5371, 0.4477, 0.5629, 0.4129)


class WindingAmbiguity(RuntimeError):
    def __init__(self, message: str, rect):
        super().__init__(f"{message} on rectangle {tuple(rect)}")
        self.rect = tuple(rect)


@dataclass
class Zero:
    k: complex
    multiplicity: int
    residual: float

    @property
    def on_axis(self) -> bool:
        return abs(self.k.real) <= AXIS_TOL * (1 + abs(self.k))


@dataclass
class AxisZero:
    k: complex
    multiplicity: int
    interval: int | None        # j with k in I_j, None outside [-k_1, 0]
    bracket: tuple[float, float] | None  # (mu_j, tau_{j+1})


@dataclass
class ResonanceSet:
    region: tuple[float, float, float, float]
    zeros: list[Zero]
    axis_zeros: list[AxisZero]
    winding: int
    axis_scan: list[float] = field(default_factory=list)   # s > 0 with F(-i s) = 0
    symmetry_defect: float = 0.0
    eigenvalues: list[float] = field(default_factory=list)
    threshold: bool = False

    @property
    def total_multiplicity(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    def to_dict(self) -> dict:
        return {
            "region": list(self.region),
            "winding": self.winding,
            "zeros": [{"re": z.k.real, "im": z.k.imag, "multiplicity": z.multiplicity,
                       "residual": z.residual, "axis": z.on_axis} for z in self.zeros],
            "axis_zeros": [{"im": a.k.imag, "multiplicity": a.multiplicity, "interval": a.interval,
                            "bracket": None if a.bracket is None else list(a.bracket)}
                           for a in self.axis_zeros],
            "axis_scan": [-s for s in self.axis_scan],
            "symmetry_defect": self.symmetry_defect,
            "threshold_resonance": self.threshold,
        }


# winding numbers ------------------------------------------------------------------

def _boundary(rect, per_unit: float = 8.0, minimum: int = 16) -> np.ndarray:
    x0, x1, y0, y1 = rect
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        n = max(minimum, int(math.ceil(abs(b - a) * per_unit)))
        pts.append(a + (b - a) * np.arange(n) / n)
    pts = np.concatenate(pts)
    return np.append(pts, pts[0])


def _winding(f, rect, passes: int = 14):
    """Winding number of f around rect, by unwrapped phase increments.

    Returns (winding as float, min |f| on the samples).
    """
    z = _boundary(rect)
    v = f(z)
    for _ in range(passes):
        step = np.angle(v[1:] / v[:-1])
        bad = np.abs(step) > MAX_STEP
        if not bad.any():
            break
        idx = np.nonzero(bad)[0]
        mid = 0.5 * (z[idx] + z[idx + 1])
        fm = f(mid)
        z = np.insert(z, idx + 1, mid)
        v = np.insert(v, idx + 1, fm)
    total = np.angle(v[1:] / v[:-1]).sum()
    return total / (2 * math.pi), float(np.min(np.abs(v)))


def count_zeros(p: Potential, rect, f=None) -> int:
    """Zeros (with multiplicity) of e^{-ik} psi(k) inside rect = (x0, x1, y0, y1)."""
    x0, x1, y0, y1 = map(float, rect)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("rectangle needs x0 < x1 and y0 < y1")
    f = f or (lambda k: psi_scaled(p, k))
    size = max(x1 - x0, y1 - y0)
    r = (x0, x1, y0, y1)
    for attempt in range(7):
        w, fmin = _winding(f, r)
        if abs(w - round(w)) < GUARD:
            return int(round(w))
        # nudge the boundary off a nearby zero
        d = size * 1e-3 * (attempt + 1)
        r = (x0 - d, x1 + d * 0.731, y0 - d * 0.613, y1 + (d * 0.377 if y1 < 0 else 0.0))
    raise WindingAmbiguity(f"winding {w:.3f} not near an integer", rect)


# quadtree ----------------------------------------------------------------------

def _newton(f, k0: complex, rect, iters: int = 60):
    x0, x1, y0, y1 = rect
    pad = 1e-9 * (1 + abs(k0))
    k = k0
    for _ in range(iters):
        h = 1e-7 * (1 + abs(k))
        fk = f(k)
        d = (f(k + h) - f(k - h)) / (2 * h)
        if d == 0:
            return None
        step = fk / d
        k = k - step
        if not (x0 - pad <= k.real <= x1 + pad and y0 - pad <= k.imag <= y1 + pad):
            return None
        if abs(step) < 1e-14 * (1 + abs(k)):
            return k
    return k if abs(f(k)) < 1e-10 else None


def _split(rect, frac):
    x0, x1, y0, y1 = rect
    xm = x0 + frac * (x1 - x0)
    ym = y0 + (1 - frac) * (y1 - y0)
    return [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]


def _search(f, rect, n: int, out: list, depth: int = 0):
    if n == 0:
        return
    x0, x1, y0, y1 = rect
    size = max(x1 - x0, y1 - y0)
    if n == 1:
        k = _newton(f, complex((x0 + x1) / 2, (y0 + y1) / 2), rect)
        if k is not None:
            out.append(Zero(k, 1, float(abs(f(k)))))
            return
    if size < MIN_LEAF:
        k = complex((x0 + x1) / 2, (y0 + y1) / 2)
        out.append(Zero(k, n, float(abs(f(k)))))
        return
    for frac in SPLITS:
        kids = _split(rect, frac)
        try:
            counts = [count_zeros(None, r, f) for r in kids]
        except WindingAmbiguity:
            continue
        if sum(counts) == n and min(counts) >= 0:
            for r, c in zip(kids, counts):
                _search(f, r, c, out, depth + 1)
            return
    raise WindingAmbiguity(f"children never add up to {n} zeros", rect)


def axis_scan(p: Potential, s_max: float, step: float = 1e-2) -> list[float]:
    """Sign changes of F(-i s) for s in (0, s_max], refined by brentq.

    The step is halved near small |F| relative to its neighbours, down to
    step / 64, so close pairs are less likely to be stepped over.
    """
    g = lambda s: axis_dirichlet(p, -s)
    roots = []
    s = min(step, s_max) / 2
    gs = g(s)
    while s < s_max:
        h = step
        s2 = min(s + h, s_max)
        g2 = g(s2)
        while h > step / 64 and gs * g2 > 0 and abs(g2) < 0.05 * (abs(gs) + 1e-300) and s2 < s_max:
            h /= 2
            s2 = s + h
            g2 = g(s2)
        if gs == 0.0:
            roots.append(s)
        elif gs * g2 < 0:
            roots.append(brentq(g, s, s2, xtol=1e-15, rtol=1e-15, maxiter=200))
        s, gs = s2, g2
    if gs == 0.0:
        roots.append(s)
    return roots


def find_resonances(p: Potential, rect=DEFAULT_RECT, upper: bool = False) -> ResonanceSet:
    """All zeros of psi in rect, with multiplicities and axis annotations."""
    x0, x1, y0, y1 = map(float, rect)
    if y1 > 0 and not upper:
        raise ValueError("rectangle reaches into the upper half plane; pass upper=True")
    if y1 >= 0 and not upper:
        y1 = -TOP_OFFSET
    if not y1 > y0:
        raise ValueError("rectangle is empty after moving the top edge below the real axis")
    region = (x0, x1, y0, y1)
    f = lambda k: psi_scaled(p, k)
    total = count_zeros(p, region, f)
    zeros: list[Zero] = []
    _search(f, region, total, zeros)
    zeros.sort(key=lambda z: (round(z.k.imag, 12), z.k.real))
    for z in zeros:
        if z.on_axis:
            z.k = complex(0.0, z.k.imag)

    dspec = halfline_dirichlet_spectrum(p)
    E = dspec.eigenvalues
    mu = interval_eigenvalues(p, DIRICHLET, len(E)).eigenvalues() if E else []
    tau = interval_eigenvalues(p, MIXED01, len(E) + 1).eigenvalues() if E else []
    axis = []
    for z in zeros:
        if not z.on_axis or z.k.imag >= 0:
            continue
        e = -z.k.imag ** 2     # k^2 for k = -i s
        j = None
        for i in range(len(E)):
            upper_e = E[i + 1] if i + 1 < len(E) else 0.0
            if E[i] < e < upper_e:
                j = i + 1
        axis.append(AxisZero(z.k, z.multiplicity, j, None if j is None else (mu[j - 1], tau[j])))

    s_max = min(-y0, math.sqrt(-E[0]) if E else -y0)
    scan = axis_scan(p, s_max) if s_max > 0 else []

    defect = 0.0
    for z in zeros:
        if z.on_axis:
            continue
        mirror = -z.k.conjugate()
        if x0 <= mirror.real <= x1:
            defect = max(defect, min(abs(w.k - mirror) for w in zeros))
    return ResonanceSet(region, zeros, axis, total, scan, defect, E, dspec.threshold)


def check_localization(p: Potential, rset: ResonanceSet) -> list[report.ReportEntry]:
    """Axis zeros in I_j lie between mu_j and tau_{j+1}; parity of #I_j."""
    out = []
    for a in rset.axis_zeros:
        if a.interval is None:
            continue
        j = a.interval
        e = -a.k.imag ** 2
        mu_j, tau_next = a.bracket
        out.append(report.strict("D2r", f"mu_{j} < k_o^2 (k_o = {a.k.imag:.12g}i)", mu_j, e))
        out.append(report.strict("D2r", f"k_o^2 < tau_{j + 1} (k_o = {a.k.imag:.12g}i)", e, tau_next))
    E = rset.eigenvalues
    m = len(E)
    if m == 0:
        return out
    x0, x1, y0, _ = rset.region
    covers = x0 < 0 < x1 and -y0 >= math.sqrt(-E[0])
    for j in range(1, m + 1):
        c = sum(a.multiplicity for a in rset.axis_zeros if a.interval == j)
        if j == m and rset.threshold:
            c += 1
        want = "even" if j == m else "odd"
        stmt = f"#I_{j} = {c} is {want}" + ("" if j == m else " and >= 1")
        if not covers:
            out.append(report.skipped("parity", stmt, "rectangle does not cover [-k_1, 0]"))
            continue
        ok = (c % 2 == 0) if j == m else (c % 2 == 1)
        out.append(report.ReportEntry("parity", stmt, c, None, None, report.PASS if ok else report.FAIL, 0.0))
    return out


def check_consistency(p: Potential, rset: ResonanceSet) -> list[report.ReportEntry]:
    """Winding total vs enumerated zeros, 2-d vs 1-d axis zeros, k -> -conj(k) pairing."""
    out = [report.equal("resonances", "sum of multiplicities = winding number",
                        rset.total_multiplicity, rset.winding)]
    axis_s = [-a.k.imag for a in rset.axis_zeros for _ in range(1)]
    for s in rset.axis_scan:
        d = min((abs(s - t) for t in axis_s), default=math.inf)
        out.append(report.nonstrict("resonances", f"axis scan root -{s:.12g}i matched by 2-d search",
                                    d, 1e-8, 0.0))
    out.append(report.nonstrict("resonances", "symmetry k -> -conj(k) pairing distance <= 1e-8",
                                rset.symmetry_defect, 1e-8, 0.0))
    return out
