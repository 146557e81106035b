"""Counting and eigenvalue-sum bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import report
from .interval import DIRICHLET, MIXED01, PERIODIC, count_negative, interval_eigenvalues, periodic_spectrum
from .potential import Potential, functionals, shift, staircase
from .scattering import line_spectrum

GAMMA_GAPS = 64
MAX_GAPS = 512
TAIL_WINDOW = 8
TAIL_RATIO = 1e-6
MEAN_ZERO_TOL = 1e-12
GAP_LAYERS = 256


class TruncationInsufficient(RuntimeError):
    pass


@dataclass
class GapEstimate:
    gamma: float
    gaps: list[float]
    shift: float           # c0 = int q; gaps refer to q - c0
    norm: float            # L2 norm of q - c0
    tail: float            # sum of gamma_n^2 over the last TAIL_WINDOW gaps
    n_gaps: int

    @staticmethod
    def _rhs(x: float) -> float:
        return 2.0 * x * max(1.0, x ** (1.0 / 3.0))

    @property
    def rhs_2gamma(self) -> float:
        """2 gamma max(1, gamma^(1/3))."""
        return self._rhs(self.gamma)

    @property
    def rhs_norm(self) -> float:
        """2 ||q|| max(1, ||q||^(1/3))."""
        return self._rhs(self.norm)

    @property
    def tail_ok(self) -> bool:
        return self.tail <= TAIL_RATIO * self.gamma**2


def gap_estimate(p: Potential, n_max: int = GAMMA_GAPS) -> GapEstimate:
    """gamma = (sum gamma_n^2)^(1/2) over the first n_max gaps of q - c0.

    n_max doubles until the last TAIL_WINDOW gaps carry less than
    TAIL_RATIO of gamma^2; past MAX_GAPS this raises TruncationInsufficient.
    Polynomial cells are replaced by a fine staircase first, whose gaps are
    computed without extrapolation noise.
    """
    f = functionals(p)
    c0 = f.int_q
    q0 = staircase(shift(p, c0), GAP_LAYERS)
    norm = math.sqrt(max(f.l2_norm ** 2 - c0 * c0, 0.0))
    n = n_max
    while True:
        table = periodic_spectrum(q0, n)
        gaps = list(table.gaps)
        tail = sum(g * g for g in gaps[-TAIL_WINDOW:])
        est = GapEstimate(table.gamma, gaps, c0, norm, tail, n)
        if est.tail_ok or n >= MAX_GAPS:
            break
        n *= 2
    if not est.tail_ok:
        raise TruncationInsufficient(
            f"tail {tail:.3g} of the last {TAIL_WINDOW} gaps exceeds {TAIL_RATIO:g} gamma^2 "
            f"= {TAIL_RATIO * est.gamma**2:.3g} at {n} gaps"
        )
    return est


@dataclass
class BoundsReport:
    entries: list[report.ReportEntry]
    inputs: dict = field(default_factory=dict)


def _sums(p: Potential):
    """Both variants of S: over negative mu_n, and half the sum over negative
    lambda_n^+- with n > 0."""
    n0 = count_negative(p, DIRICHLET)
    mu = interval_eigenvalues(p, DIRICHLET, n0).eigenvalues() if n0 else []
    s_mu = sum(math.sqrt(-m) for m in mu if m < 0)
    npi = count_negative(p, PERIODIC)
    k = max((npi + 1) // 2, 1)
    per = periodic_spectrum(p, k).values
    s_lam = 0.5 * sum(math.sqrt(-e.value) for e in per if e.index > 0 and e.value < 0)
    return s_mu, s_lam, npi


def check_bounds(p: Potential, with_gamma: bool = True, line=None) -> BoundsReport:
    """All applicable bounds; inapplicable ones are skipped with the reason."""
    R = report
    f = functionals(p)
    n0 = count_negative(p, DIRICHLET)
    n01 = count_negative(p, MIXED01)
    s_mu, s_lam, npi = _sums(p)
    out = [
        R.nonstrict("nu1", "(n_-(H_pi) - 1)/2 <= n_-(H0)", 0.5 * (npi - 1), n0, 0.0),
        R.nonstrict("nu1", "n_-(H0) <= n_-(H01)", n0, n01, 0.0),
        R.nonstrict("nu1", "n_-(H01) <= int x q_-", n01, f.int_xq_minus),
        R.nonstrict("nu2", "S_mu = sum |mu_n|^(1/2) <= (1/2) int q_-", s_mu, 0.5 * f.int_q_minus),
        R.nonstrict("nu2", "S_lambda = (1/2) sum |lambda_n^+-|^(1/2) <= (1/2) int q_-", s_lam, 0.5 * f.int_q_minus),
    ]
    cc = 2.0 / math.pi * f.int_sqrt_q_minus
    if f.is_monotone:
        out.append(R.nonstrict("nu3", "n_-(H01) <= (2/pi) int q_-^(1/2)  [q monotone]", n01, cc))
    else:
        out.append(R.skipped("nu3", "n_-(H01) <= (2/pi) int q_-^(1/2)", "q is not monotone"))
    if f.minus_part_nonincreasing:
        out.append(R.nonstrict("nu3-cc", "n_-(H01) <= (2/pi) int q_-^(1/2)  [q_- nonincreasing]", n01, cc))
    else:
        out.append(R.skipped("nu3-cc", "n_-(H01) <= (2/pi) int q_-^(1/2)", "q_- is not nonincreasing"))

    line = line if line is not None else line_spectrum(p)
    w_left = sum(math.sqrt(-e) for e in line.eigenvalues)
    out.append(R.nonstrict("W", "sum |E_line|^(1/2) <= (1/2) int q_-", w_left, 0.5 * f.int_q_minus))

    inputs = {"functionals": f.as_dict(), "n0": n0, "n01": n01, "n_pi": npi,
              "S_mu": s_mu, "S_lambda": s_lam}
    if with_gamma:
        out += _gamma_entries(p, f, inputs)
    return BoundsReport(out, inputs)


def _gamma_entries(p: Potential, f, inputs: dict) -> list[report.ReportEntry]:
    R = report
    try:
        est = gap_estimate(p)
    except TruncationInsufficient as exc:
        return [R.skipped("nu2x", "n_-(H01) <= 2 gamma max(1, gamma^(1/3))", str(exc)),
                R.skipped("esg1", "gamma estimates", str(exc))]
    label = "" if abs(est.shift) <= MEAN_ZERO_TOL else f"  [q - c0, c0 = {est.shift:.17g}]"
    q0 = p if not label else shift(p, est.shift)
    inputs.update({"gamma": est.gamma, "gamma_gaps": est.n_gaps, "gamma_tail": est.tail,
                   "c0": est.shift, "norm_q_minus_c0": est.norm})
    n01 = count_negative(q0, MIXED01)
    n0 = count_negative(q0, DIRICHLET)
    s_mu, s_lam, npi = _sums(q0)
    rhs = est.rhs_2gamma
    note = f"gamma truncated at {est.n_gaps} gaps, tail {est.tail:.3g}"
    out = [
        R.nonstrict("nu2x", "(n_-(H_pi) - 1)/2 <= n_-(H0)" + label, 0.5 * (npi - 1), n0, 0.0),
        R.nonstrict("nu2x", "n_-(H0) <= n_-(H01)" + label, n0, n01, 0.0),
        R.nonstrict("nu2x", "n_-(H01) <= 2 gamma max(1, gamma^(1/3))" + label, n01, rhs),
        R.nonstrict("nu2x", "S_mu <= 2 gamma max(1, gamma^(1/3))" + label, s_mu, rhs),
        R.nonstrict("nu2x", "S_lambda <= 2 gamma max(1, gamma^(1/3))" + label, s_lam, rhs),
    ]
    for e in out:
        e.note = note
    # gamma from finitely many gaps is a lower bound for the true gamma, so
    # ||q|| <= 2 gamma max(...) can only be checked up to the truncation
    low = R.nonstrict("esg1", "||q|| <= 2 gamma max(1, gamma^(1/3))  (consistency within truncation)" + label,
                      est.norm, rhs, 1e-9 * (1 + est.norm))
    low.note = note + (": consistent" if low.status == R.PASS else ": inconsistent")
    up = R.nonstrict("esg1", "gamma <= 2 ||q|| max(1, ||q||^(1/3))" + label, est.gamma, est.rhs_norm,
                     1e-9 * (1 + est.gamma))
    up.note = note
    return out + [low, up]
