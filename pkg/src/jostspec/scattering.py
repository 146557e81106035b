"""Jost function, derivative Jost function and Wronskian from interval data.

With lam = k**2 and the fundamental matrix at x = 1,

    e^{-ik} psi(k)        = phi'(1) - i k phi(1)
    e^{-ik} psi'(k)       = i k theta(1) - theta'(1)
    e^{-ik} w(k)          = 2 i k Delta + lam phi(1) - theta'(1)

where psi = f_+(0, k) and psi' = f_+'(0, k). The scaled left-hand sides are
entire and real on the imaginary axis; all root finding uses them.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import report
from .interval import (
    DIRICHLET, MIXED01, MIXED10, NEUMANN, count_below, eigenvalues_below, interval_eigenvalues,
)
from .potential import Potential, even_extension_rescaled
from .transfer import entries

CASE_T = "T"            # half line, y(0) = 0
CASE_TN = "T~"          # half line, y'(0) = 0
CASE_LINE = "Tline"     # whole line
CASE_EVEN = "Tline_e"   # whole line, even extension

THRESHOLD_TOL = 1e-8
SCAN_POINTS = 400


class BracketAnomaly(RuntimeError):
    """Sign pattern of a characteristic function contradicts the interlacing theorem."""

    def __init__(self, message: str, case: str, scan_roots=(), bracket_roots=(), brackets=()):
        super().__init__(message)
        self.case = case
        self.scan_roots = list(scan_roots)
        self.bracket_roots = list(bracket_roots)
        self.brackets = list(brackets)


@dataclass(frozen=True)
class JostEvaluation:
    k: complex
    psi: complex
    psi_prime: complex
    wronskian: complex
    psi_scaled: complex
    psi_prime_scaled: complex
    wronskian_scaled: complex


def scaled_jost(p: Potential, k):
    """(e^{-ik} psi, e^{-ik} psi', e^{-ik} w); k scalar or array."""
    k = np.asarray(k, dtype=complex) if np.ndim(k) else complex(k)
    lam = k * k
    th, ph, dth, dph = entries(p, lam)
    ik = 1j * k
    return dph - ik * ph, ik * th - dth, ik * (th + dph) + lam * ph - dth


def jost(p: Potential, k) -> JostEvaluation:
    k = complex(k)
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise ValueError(f"momentum must be finite, got {k!r}")
    s_psi, s_dpsi, s_w = scaled_jost(p, k)
    e = cmath.exp(1j * k)
    return JostEvaluation(k, e * s_psi, e * s_dpsi, e * s_w, s_psi, s_dpsi, s_w)


def psi_scaled(p: Potential, k):
    """e^{-ik} psi(k) alone; vectorised over k."""
    k = np.asarray(k, dtype=complex) if np.ndim(k) else complex(k)
    _, ph, _, dph = entries(p, k * k)
    return dph - 1j * k * ph


# real functions of t on the imaginary axis k = i t ------------------------------

def axis_dirichlet(p: Potential, t: float) -> float:
    """e^{t} psi(i t) = phi'(1, -t^2) + t phi(1, -t^2)."""
    _, ph, _, dph = entries(p, -t * t)
    return dph + t * ph


def axis_neumann(p: Potential, t: float) -> float:
    """e^{t} psi'(i t) = -t theta(1, -t^2) - theta'(1, -t^2)."""
    th, _, dth, _ = entries(p, -t * t)
    return -t * th - dth


def axis_line(p: Potential, t: float) -> float:
    """e^{t} w(i t) = -2 t Delta - t^2 phi(1) - theta'(1) at lam = -t^2."""
    th, ph, dth, dph = entries(p, -t * t)
    return -t * (th + dph) - t * t * ph - dth


AXIS_FUNCTION = {CASE_T: axis_dirichlet, CASE_TN: axis_neumann, CASE_LINE: axis_line}


@dataclass
class DiscreteSpectrum:
    case: str
    eigenvalues: list[float]
    residuals: list[float]
    threshold: bool = False
    brackets: list = field(default_factory=list)

    @property
    def momenta(self) -> list[complex]:
        return [1j * math.sqrt(-e) for e in self.eigenvalues]

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "eigenvalues": list(self.eigenvalues),
            "momenta_imag": [m.imag for m in self.momenta],
            "residuals": list(self.residuals),
            "threshold_resonance": self.threshold,
        }


def _sign_roots(f, grid) -> list[float]:
    """Roots of f at sign changes over a sorted grid."""
    vals = [f(t) for t in grid]
    roots = []
    for (a, fa), (b, fb) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if fa == 0.0:
            if a > 0 and (not roots or roots[-1] != a):
                roots.append(a)
            continue
        if fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-15, rtol=4 * 2.3e-16, maxiter=200))
    if vals and vals[-1] == 0.0 and grid[-1] > 0:
        roots.append(grid[-1])
    return roots


def _t_of(lam: float) -> float:
    return math.sqrt(max(-lam, 0.0))


def _solve_case(p: Potential, case: str, lam_brackets: list[tuple[float, float]]) -> DiscreteSpectrum:
    """Find all eigenvalues of one case; cross-check a full scan against brackets.

    ``lam_brackets`` are the theorem's open intervals (already clipped to
    lam < 0). A root is searched in each; independently, a sign scan over
    [-max q_-, 0] collects every root. Any disagreement raises BracketAnomaly.
    """
    f = lambda t: AXIS_FUNCTION[case](p, t)
    t_max = math.sqrt(p.sup_negative_part()) * (1 + 1e-12) + 1e-12
    t_brackets = [(_t_of(b), _t_of(a)) for a, b in lam_brackets]

    bracket_roots = []
    for lo, hi in t_brackets:
        flo, fhi = f(lo), f(hi)
        if lo == 0.0 and flo == 0.0:
            lo = min(1e-12, hi / 2)
            flo = f(lo)
        if flo == 0.0:
            bracket_roots.append(lo)
        elif fhi == 0.0:
            bracket_roots.append(hi)
        elif flo * fhi < 0:
            bracket_roots.append(brentq(f, lo, hi, xtol=1e-15, rtol=4 * 2.3e-16, maxiter=200))
        else:
            bracket_roots.append(None)

    knots = {0.0, t_max}
    for lo, hi in t_brackets:
        knots.update((lo, hi))
    grid = sorted(set(np.linspace(0.0, t_max, SCAN_POINTS).tolist()) | {x for x in knots if 0 <= x <= t_max})
    scan = sorted(_sign_roots(f, grid))

    zero_val = f(0.0)
    threshold = abs(zero_val) < THRESHOLD_TOL * (1 + p.l1_norm())
    if threshold:
        scan = [t for t in scan if t > 1e-7]

    found = sorted((r for r in bracket_roots if r is not None), reverse=True)
    ok = None not in bracket_roots and len(scan) == len(found) and all(
        abs(a - b) <= 1e-9 * max(1.0, a) for a, b in zip(sorted(scan, reverse=True), found)
    )
    eig = [-t * t for t in sorted(scan, reverse=True)]
    if not ok:
        raise BracketAnomaly(
            f"{case}: scan roots {eig} vs bracketed roots "
            f"{[None if r is None else -r * r for r in bracket_roots]} in brackets {lam_brackets}",
            case, eig, [None if r is None else -r * r for r in bracket_roots], lam_brackets,
        )
    res = [abs(f(_t_of(e))) for e in eig]
    return DiscreteSpectrum(case, eig, res, threshold, lam_brackets)


def _negatives(p: Potential, family: str) -> list[float]:
    return eigenvalues_below(p, family, 0.0)


def _first_n(p: Potential, family: str, n: int) -> list[float]:
    return interval_eigenvalues(p, family, n).eigenvalues() if n > 0 else []


def halfline_dirichlet_spectrum(p: Potential) -> DiscreteSpectrum:
    """Eigenvalues of -y'' + q y on the half line with y(0) = 0."""
    m = count_below(p, MIXED01, 0.0)
    tau = _first_n(p, MIXED01, m)
    mu = _first_n(p, DIRICHLET, m)
    brackets = [(tau[j], min(mu[j], 0.0)) for j in range(m)]
    return _solve_case(p, CASE_T, brackets)


def halfline_neumann_spectrum(p: Potential) -> DiscreteSpectrum:
    """Eigenvalues of -y'' + q y on the half line with y'(0) = 0."""
    n = count_below(p, NEUMANN, 0.0)
    nu = _first_n(p, NEUMANN, n)
    rho = _first_n(p, MIXED10, n)
    brackets = [(nu[j], min(rho[j], 0.0)) for j in range(n)]
    return _solve_case(p, CASE_TN, brackets)


def line_spectrum(p: Potential, t_spec: DiscreteSpectrum | None = None,
                  tn_spec: DiscreteSpectrum | None = None) -> DiscreteSpectrum:
    """Eigenvalues of -y'' + q y on the whole line (q = 0 outside [0, 1])."""
    t_spec = t_spec or halfline_dirichlet_spectrum(p)
    tn_spec = tn_spec or halfline_neumann_spectrum(p)
    E, Et = t_spec.eigenvalues, tn_spec.eigenvalues
    brackets = [(Et[j], min(E[j], 0.0) if j < len(E) else 0.0) for j in range(len(Et))]
    return _solve_case(p, CASE_LINE, brackets)


def even_wronskian(p: Potential, k):
    """w_e(k) for the even extension q(|x|), via the rescaled unit-interval problem.

    With Q(s) = 4 q(|2s - 1|) on [0, 1]: w_e(k) = W_Q(2k) / 2.
    """
    Q = even_extension_rescaled(p)
    K = 2 * np.asarray(k, dtype=complex)
    _, _, sw = scaled_jost(Q, K)
    return 0.5 * np.exp(1j * K) * sw


def hausdorff(a, b) -> float:
    if not a and not b:
        return 0.0
    if not a or not b:
        return math.inf
    d1 = max(min(abs(x - y) for y in b) for x in a)
    d2 = max(min(abs(x - y) for y in a) for x in b)
    return max(d1, d2)


@dataclass
class EvenLineResult:
    spectrum: DiscreteSpectrum
    union: list[float]
    hausdorff: float
    factorization_residual: float
    grid: list[complex]


def even_line_spectrum(p: Potential, t_spec: DiscreteSpectrum | None = None,
                       tn_spec: DiscreteSpectrum | None = None, k_grid=None) -> EvenLineResult:
    """Discrete spectrum of the even extension, found from its own Wronskian.

    Also returns the distance to sigma_d(T) U sigma_d(T~) and the largest
    relative factorisation residual |w_e - 2 psi psi'| / (1 + |w_e|) on the
    k-grid (default: 50 points of i[-3, 3]).
    """
    t_spec = t_spec or halfline_dirichlet_spectrum(p)
    tn_spec = tn_spec or halfline_neumann_spectrum(p)
    Q = even_extension_rescaled(p)
    line_q = line_spectrum(Q)
    eig = [e / 4.0 for e in line_q.eigenvalues]
    res = [r for r in line_q.residuals]
    spec = DiscreteSpectrum(CASE_EVEN, eig, res, line_q.threshold,
                            [(a / 4.0, b / 4.0) for a, b in line_q.brackets])
    union = sorted(t_spec.eigenvalues + tn_spec.eigenvalues)
    if k_grid is None:
        k_grid = 1j * np.linspace(-3.0, 3.0, 50)
    k_grid = np.asarray(k_grid, dtype=complex)
    we = even_wronskian(p, k_grid)
    s_psi, s_dpsi, _ = scaled_jost(p, k_grid)
    prod = 2.0 * np.exp(2j * k_grid) * s_psi * s_dpsi
    resid = float(np.max(np.abs(we - prod) / (1.0 + np.abs(we))))
    return EvenLineResult(spec, union, hausdorff(eig, union), resid, k_grid.tolist())


# theorem checks -------------------------------------------------------------------


@dataclass
class ScatteringData:
    T: DiscreteSpectrum
    Tn: DiscreteSpectrum
    line: DiscreteSpectrum
    even: EvenLineResult | None = None


def check_theorem(p: Potential, data: ScatteringData) -> list[report.ReportEntry]:
    """Counting identities and interlacing for the three half-line/line cases
    and for the even extension."""
    E, Et, El = data.T.eigenvalues, data.Tn.eigenvalues, data.line.eigenvalues
    m, N, NN = len(E), len(Et), len(El)
    n01 = count_below(p, MIXED01, 0.0)
    n0 = count_below(p, DIRICHLET, 0.0)
    n1 = count_below(p, NEUMANN, 0.0)
    k = max(m, N, n01, n1) + 1
    mu = _first_n(p, DIRICHLET, k)
    nu = _first_n(p, NEUMANN, k + 1)
    tau = _first_n(p, MIXED01, k)
    rho = _first_n(p, MIXED10, k)
    out = []
    R = report
    out.append(R.equal("D1", "n_-(T) = n_-(H01)", m, n01))
    out.append(R.nonstrict("D1", "n_-(H0) <= n_-(H01)", n0, n01, 0.0))
    out.append(R.equal("N1", "n_-(T~) = n_-(H1)", N, n1))
    out.append(R.equal("N1x", "n_-(Tline) = n_-(T~)", NN, N))

    for j in range(1, m + 1):
        out.append(R.strict("D2", f"tau_{j} < E_{j}", tau[j - 1], E[j - 1]))
        if j < m:
            out.append(R.strict("D2", f"E_{j} < mu_{j}", E[j - 1], mu[j - 1]))
            out.append(R.strict("D2", f"mu_{j} < tau_{j + 1}", mu[j - 1], tau[j]))
        else:
            out.append(R.strict("D2", f"E_{j} < min(0, mu_{j})", E[j - 1], min(0.0, mu[j - 1])))

    for j in range(1, N + 1):
        out.append(R.strict("N2", f"nu_{j - 1} < E~_{j}", nu[j - 1], Et[j - 1]))
        if j < N:
            out.append(R.strict("N2", f"E~_{j} < rho_{j}", Et[j - 1], rho[j - 1]))
            out.append(R.strict("N2", f"rho_{j} < nu_{j}", rho[j - 1], nu[j]))
        else:
            out.append(R.strict("N2", f"E~_{j} < min(0, rho_{j})", Et[j - 1], min(0.0, rho[j - 1])))

    # E~_1 < E_1 < E~_2 < E_2 < ... and the m = N - 1 / m = N dichotomy
    for j in range(1, N + 1):
        if j <= m:
            out.append(R.strict("N3", f"E~_{j} < E_{j}", Et[j - 1], E[j - 1]))
        if j < N and j <= m:
            out.append(R.strict("N3", f"E_{j} < E~_{j + 1}", E[j - 1], Et[j]))
    if N >= 1:
        tN = tau[N - 1]
        expected = N if tN < 0 else N - 1
        entry = R.equal("N3", f"m = {'N' if tN < 0 else 'N-1'} (tau_N = {tN:.6g})", m, expected)
        if abs(tN) <= R.STRICT_TOL:
            entry.status = R.DEGENERATE
            entry.note = "tau_N numerically zero"
        out.append(entry)
    else:
        out.append(R.equal("N3", "m = 0 when N = 0", m, 0))

    for j in range(1, NN + 1):
        if j <= N:
            out.append(R.strict("N2x", f"E~_{j} < Eline_{j}", Et[j - 1], El[j - 1]))
        if j < NN or j <= m:
            if j <= m:
                rhs_name, rhs = f"E_{j}", E[j - 1]
                if j == NN:
                    rhs_name, rhs = f"min(0, E_{j})", min(0.0, rhs)
                out.append(R.strict("N2x", f"Eline_{j} < {rhs_name}", El[j - 1], rhs))
        else:
            out.append(R.strict("N2x", f"Eline_{j} < 0", El[j - 1], 0.0))
        if j < NN and j <= m:
            out.append(R.strict("N2x", f"E_{j} < nu_{j}", E[j - 1], nu[j]))
            out.append(R.strict("N2x", f"nu_{j} < E~_{j + 1}", nu[j], Et[j]))

    if data.even is not None:
        ev = data.even
        ne = ev.spectrum.count
        if N == 0:
            expected = 0
        else:
            expected = 2 * N if tau[N - 1] < 0 else 2 * N - 1
        out.append(R.equal("ev1", "n_e = N + m (2N-1 if tau_N >= 0, 2N if tau_N < 0)", ne, expected))
        out.append(R.nonstrict("ev1", "Hausdorff(sigma_d(Tline_e), sigma_d(T) U sigma_d(T~)) <= 1e-7",
                               ev.hausdorff, 1e-7, 0.0))
        out.append(R.nonstrict("tw", "max |w_e - 2 psi psi'| / (1 + |w_e|) <= 1e-8",
                               ev.factorization_residual, 1e-8, 0.0))
        Ee = ev.spectrum.eigenvalues
        for i, e in enumerate(Ee, start=1):
            j = (i + 1) // 2
            if i % 2:
                out.append(R.strict("ev2", f"nu_{j - 1} < Ee_{i}", nu[j - 1], e))
                out.append(R.strict("ev2", f"Ee_{i} < rho_{j}", e, rho[j - 1]))
            else:
                out.append(R.strict("ev2", f"tau_{j} < Ee_{i}", tau[j - 1], e))
                out.append(R.strict("ev2", f"Ee_{i} < mu_{j}", e, mu[j - 1]))
    return out


def scattering_data(p: Potential, with_even: bool = True) -> ScatteringData:
    T = halfline_dirichlet_spectrum(p)
    Tn = halfline_neumann_spectrum(p)
    line = line_spectrum(p, T, Tn)
    even = even_line_spectrum(p, T, Tn) if with_even else None
    return ScatteringData(T, Tn, line, even)
