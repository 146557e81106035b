"""Eigenvalues of the unit-interval and 2-periodic problems.

Families and their characteristic functions (entries of the fundamental
matrix at x = 1):

    dirichlet  mu_n,  n >= 1   y(0) = y(1) = 0      phi(1, lam)
    neumann    nu_n,  n >= 0   y'(0) = y'(1) = 0    theta'(1, lam)
    mixed01    tau_n, n >= 1   y(0) = y'(1) = 0     phi'(1, lam)
    mixed10    rho_n, n >= 1   y'(0) = y(1) = 0     theta(1, lam)
    periodic   lambda_0^+, lambda_n^-/+ on [0, 2]   Delta(lam) = +-1
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import report
from .potential import Potential, functionals
from .transfer import PHI_START, THETA_START, entries, lyapunov, prufer_state

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
MIXED01 = "mixed01"
MIXED10 = "mixed10"
PERIODIC = "periodic"
INTERVAL_FAMILIES = (DIRICHLET, NEUMANN, MIXED01, MIXED10)
FAMILIES = INTERVAL_FAMILIES + (PERIODIC,)

SYMBOL = {DIRICHLET: "mu", NEUMANN: "nu", MIXED01: "tau", MIXED10: "rho", PERIODIC: "lambda"}
FIRST_INDEX = {DIRICHLET: 1, NEUMANN: 0, MIXED01: 1, MIXED10: 1}

# a closed gap is a double root of (-1)^n Delta - 1; rounding splits it by
# O(sqrt(eps lam)), so gaps are resolved relative to sqrt(lam), not lam
CLOSED_GAP_TOL = 1e-6
RESIDUAL_TOL = 1e-9
_RTOL = 4 * float(np.finfo(float).eps)


class SpectrumError(RuntimeError):
    """Root isolation or refinement failed; carries family, index and bracket."""

    def __init__(self, message: str, family: str = "", index: int | None = None, bracket=None):
        super().__init__(message)
        self.family = family
        self.index = index
        self.bracket = bracket


@dataclass(frozen=True)
class Eigenvalue:
    index: int
    value: float
    residual: float
    label: str = ""


@dataclass
class SpectrumTable:
    family: str
    values: list[Eigenvalue]
    count_negative: int
    gaps: list[float] = field(default_factory=list)
    gamma: float | None = None

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i) -> float:
        return self.values[i].value

    def eigenvalues(self) -> list[float]:
        return [e.value for e in self.values]

    def by_label(self) -> dict[str, float]:
        return {e.label: e.value for e in self.values}

    def to_dict(self) -> dict:
        d = {
            "family": self.family,
            "count_negative": self.count_negative,
            "values": [
                {"index": e.index, "label": e.label, "eigenvalue": e.value, "residual": e.residual}
                for e in self.values
            ],
        }
        if self.family == PERIODIC:
            d["gaps"] = list(self.gaps)
            d["gamma"] = self.gamma
        return d


def _check_family(family: str) -> None:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def characteristic(p: Potential, family: str, lam: float) -> float:
    """Characteristic function scaled to be O(1) for large lam."""
    th, ph, dth, dph = entries(p, lam)
    r = math.sqrt(max(1.0, abs(lam)))
    if family == DIRICHLET:
        return ph * r
    if family == NEUMANN:
        return dth / r
    if family == MIXED01:
        return dph
    if family == MIXED10:
        return th
    raise ValueError(family)


def count_below(p: Potential, family: str, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam`` (exact for the layered potential)."""
    if family in (DIRICHLET, MIXED01):
        zeros, alpha = prufer_state(p, lam, PHI_START)
    else:
        zeros, alpha = prufer_state(p, lam, THETA_START)
    if family in (DIRICHLET, MIXED10):
        return zeros - (1 if alpha == 0.0 else 0)
    return zeros + (1 if alpha > math.pi / 2 else 0)


def lower_bound(p: Potential) -> float:
    """No eigenvalue of any family lies below -max q_-."""
    return -(p.sup_negative_part() + 1.0)


def _upper_seed(p: Potential, n: int) -> float:
    c0 = functionals(p).int_q
    return (math.pi * n) ** 2 + c0 + 2 * math.pi * n + 10.0


def _isolate(p, family, a, ca, b, cb, out, depth=0):
    """Split [a, b] until each piece holds exactly one eigenvalue."""
    if cb == ca:
        return
    if cb - ca == 1:
        out.append((ca, a, b))
        return
    if depth > 200 or b - a <= 1e-13 * max(1.0, abs(a)):
        raise SpectrumError(
            f"{family}: eigenvalues {ca}..{cb - 1} not separated in [{a}, {b}]",
            family, ca, (a, b),
        )
    m = 0.5 * (a + b)
    cm = count_below(p, family, m)
    _isolate(p, family, a, ca, m, cm, out, depth + 1)
    _isolate(p, family, m, cm, b, cb, out, depth + 1)


def _refine(f, a: float, b: float, family: str, index: int) -> float:
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        # layered counting and the refined function may disagree by the
        # discretisation error near an endpoint; widen a little
        w = b - a
        for grow in (1e-9, 1e-7, 1e-5):
            a2, b2 = a - grow * max(w, 1.0), b + grow * max(w, 1.0)
            fa, fb = f(a2), f(b2)
            if fa * fb <= 0:
                a, b = a2, b2
                break
        else:
            raise SpectrumError(f"{family}: no sign change for index {index} in [{a}, {b}]",
                                family, index, (a, b))
    x = brentq(f, a, b, xtol=1e-12 * max(1.0, min(abs(a), abs(b))), rtol=_RTOL, maxiter=200)
    lo, hi = (a, b) if a < b else (b, a)
    # two safeguarded Newton steps with a central difference derivative
    for _ in range(2):
        fx = f(x)
        if fx == 0.0:
            break
        d = 1e-6 * max(1.0, abs(x))
        df = (f(x + d) - f(x - d)) / (2 * d)
        if df == 0.0 or not math.isfinite(df):
            break
        xn = x - fx / df
        if lo <= xn <= hi and abs(f(xn)) < abs(fx):
            x = xn
        else:
            break
    return x


def interval_eigenvalues(p: Potential, family: str, n_max: int) -> SpectrumTable:
    """The first ``n_max`` eigenvalues of one interval family."""
    _check_family(family)
    if family == PERIODIC:
        return periodic_spectrum(p, n_max)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    lo = lower_bound(p)
    c_lo = count_below(p, family, lo)
    if c_lo != 0:
        raise SpectrumError(f"{family}: {c_lo} eigenvalues below the lower bound {lo}", family, 0, (lo, lo))
    hi = _upper_seed(p, n_max)
    c_hi = count_below(p, family, hi)
    while c_hi < n_max:
        hi = hi + abs(hi) + 10.0
        c_hi = count_below(p, family, hi)
    brackets: list = []
    _isolate(p, family, lo, 0, hi, c_hi, brackets)
    brackets = brackets[:n_max]
    f = lambda lam: characteristic(p, family, lam)
    first = FIRST_INDEX[family]
    values = []
    for k, a, b in brackets:
        x = _refine(f, a, b, family, k + first)
        sym = SYMBOL[family]
        values.append(Eigenvalue(k + first, x, abs(f(x)), f"{sym}{k + first}"))
    return SpectrumTable(family, values, count_negative(p, family))


def eigenvalues_below(p: Potential, family: str, lam: float) -> list[float]:
    """All eigenvalues of an interval family that are < lam."""
    n = count_below(p, family, lam)
    if n == 0:
        return []
    return interval_eigenvalues(p, family, n).eigenvalues()


# periodic problem ---------------------------------------------------------------


def _d(p: Potential, n: int, lam: float) -> float:
    """(-1)^n Delta(lam) - 1; nonnegative exactly on the n-th closed gap."""
    return (1 if n % 2 == 0 else -1) * lyapunov(p, lam) - 1.0


def periodic_spectrum(p: Potential, n_max: int, dirichlet: SpectrumTable | None = None,
                      neumann: SpectrumTable | None = None) -> SpectrumTable:
    """lambda_0^+ and lambda_n^-, lambda_n^+ for n <= n_max.

    Both mu_n and nu_n lie in the closed gap [lambda_n^-, lambda_n^+], where
    (-1)^n Delta - 1 >= 0, while at mu_{n-1} and mu_{n+1} it is <= -2. The
    better of mu_n, nu_n and their midpoint serves as the interior point c;
    lambda_n^- is the root in [mu_{n-1}, c], lambda_n^+ the one in [c, mu_{n+1}].
    The midpoint matters for symmetric potentials, where mu_n and nu_n sit
    on opposite gap edges.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if dirichlet is None or len(dirichlet) < n_max + 1:
        dirichlet = interval_eigenvalues(p, DIRICHLET, n_max + 1)
    if neumann is None or len(neumann) < n_max + 1:
        neumann = interval_eigenvalues(p, NEUMANN, n_max + 1)
    mu = [lower_bound(p)] + dirichlet.eigenvalues()
    nu = neumann.eigenvalues()
    values = []

    f0 = lambda lam: _d(p, 0, lam)
    lam0 = _refine(f0, mu[0], mu[1], PERIODIC, 0)
    values.append(Eigenvalue(0, lam0, abs(f0(lam0)), "0+"))
    gaps = []
    for n in range(1, n_max + 1):
        fn = lambda lam, n=n: _d(p, n, lam)
        probes = (mu[n], nu[n], 0.5 * (mu[n] + nu[n]))
        c = max(probes, key=fn)
        if fn(c) <= 0.0:
            lm = lp = c
        else:
            lm = _refine(fn, mu[n - 1], c, PERIODIC, n)
            lp = _refine(fn, c, mu[n + 1], PERIODIC, n)
        if abs(lp - lm) < CLOSED_GAP_TOL * math.sqrt(max(1.0, abs(lp))):
            lm = lp = 0.5 * (lm + lp)
        gaps.append(lp - lm)
        values.append(Eigenvalue(2 * n - 1, lm, abs(fn(lm)), f"{n}-"))
        values.append(Eigenvalue(2 * n, lp, abs(fn(lp)), f"{n}+"))
    gamma = math.sqrt(sum(g * g for g in gaps))
    return SpectrumTable(PERIODIC, values, count_negative(p, PERIODIC), gaps, gamma)


def count_negative(p: Potential, family: str) -> int:
    """n_-: number of negative eigenvalues, counted with multiplicity."""
    _check_family(family)
    if family != PERIODIC:
        return count_below(p, family, 0.0)
    d = count_below(p, DIRICHLET, 0.0)
    # lambda_0^+ .. lambda_d^- are below mu_d < 0; the two edges around
    # zero are decided by the sign of (-1)^n Delta - 1 at zero
    return 2 * d + (1 if _d(p, d, 0.0) < 0 else 0) + (1 if _d(p, d + 1, 0.0) > 0 else 0)


# interlacing ---------------------------------------------------------------------


def all_spectra(p: Potential, n_max: int) -> dict[str, SpectrumTable]:
    tables = {fam: interval_eigenvalues(p, fam, n_max + (1 if fam in (DIRICHLET, NEUMANN) else 0))
              for fam in INTERVAL_FAMILIES}
    tables[PERIODIC] = periodic_spectrum(p, n_max, tables[DIRICHLET], tables[NEUMANN])
    return tables


def check_interlacing(p: Potential, n_max: int, spectra: dict | None = None) -> list[report.ReportEntry]:
    """Every inequality of the chain

        nu_0 <= l_0^+ < rho_1, tau_1 < l_1^- <= mu_1, nu_1 <= l_1^+ < rho_2, tau_2 < ...

    up to index n_max, one entry per inequality.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    s = spectra or all_spectra(p, n_max)
    mu = {e.index: e.value for e in s[DIRICHLET].values}
    nu = {e.index: e.value for e in s[NEUMANN].values}
    tau = {e.index: e.value for e in s[MIXED01].values}
    rho = {e.index: e.value for e in s[MIXED10].values}
    per = s[PERIODIC].by_label()
    out = [report.nonstrict("bx", "nu_0 <= lambda_0^+", nu[0], per["0+"])]
    for n in range(1, n_max + 1):
        prev = per[f"{n - 1}+"]
        lm, lp = per[f"{n}-"], per[f"{n}+"]
        prev_name = f"lambda_{n - 1}^+"
        out.append(report.strict("bx", f"{prev_name} < rho_{n}", prev, rho[n]))
        out.append(report.strict("bx", f"{prev_name} < tau_{n}", prev, tau[n]))
        out.append(report.strict("bx", f"rho_{n} < lambda_{n}^-", rho[n], lm))
        out.append(report.strict("bx", f"tau_{n} < lambda_{n}^-", tau[n], lm))
        out.append(report.nonstrict("bx", f"lambda_{n}^- <= mu_{n}", lm, mu[n]))
        out.append(report.nonstrict("bx", f"lambda_{n}^- <= nu_{n}", lm, nu[n]))
        out.append(report.nonstrict("bx", f"mu_{n} <= lambda_{n}^+", mu[n], lp))
        out.append(report.nonstrict("bx", f"nu_{n} <= lambda_{n}^+", nu[n], lp))
        out.append(report.strict("periodic", f"{prev_name} < lambda_{n}^-", prev, lm))
        out.append(report.nonstrict("periodic", f"lambda_{n}^- <= lambda_{n}^+", lm, lp))
    return out
