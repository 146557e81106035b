"""The full verification pipeline for one potential."""
from __future__ import annotations

import time

from . import report
from .bounds import TruncationInsufficient, check_bounds
from .interval import SpectrumError, all_spectra, check_interlacing
from .oracle import cross_validate
from .potential import Potential
from .resonances import DEFAULT_RECT, WindingAmbiguity, check_consistency, check_localization, find_resonances
from .scattering import BracketAnomaly, check_theorem, scattering_data
from .transfer import ConvergenceError

SOLVER_ERRORS = (ConvergenceError, SpectrumError, BracketAnomaly, WindingAmbiguity, TruncationInsufficient)


def _stage(rep: report.VerificationReport, name: str, fn, timings: dict):
    t = time.perf_counter()
    try:
        return fn()
    except SOLVER_ERRORS as exc:
        rep.entries.append(report.failed(name, f"{name} stage", f"{type(exc).__name__}: {exc}"))
        rep.metadata["solver_error"] = True
        return None
    finally:
        timings[name] = time.perf_counter() - t


def verify(p: Potential, n_max: int = 10, rect=DEFAULT_RECT, oracle: bool = False,
           tol: float | None = None, timings: bool = False, with_gamma: bool = True) -> report.VerificationReport:
    """Interval spectra, scattering spectra, resonances, bounds and optionally
    the finite-difference oracle, each contributing report entries."""
    tol = report.STRICT_TOL if tol is None else tol
    rep = report.VerificationReport(metadata={
        "potential": p.to_dict(),
        "settings": {"n_max": n_max, "rect": list(rect), "oracle": oracle, "tol": tol},
        "solver_error": False,
    })
    times: dict = {}
    with report.tolerance(tol):
        spectra = _stage(rep, "interval", lambda: all_spectra(p, n_max), times)
        if spectra is not None:
            rep.extend(check_interlacing(p, n_max, spectra))
        data = _stage(rep, "scattering", lambda: scattering_data(p), times)
        if data is not None:
            rep.extend(check_theorem(p, data))
        rset = _stage(rep, "resonances", lambda: find_resonances(p, rect), times)
        if rset is not None:
            rep.extend(check_localization(p, rset))
            rep.extend(check_consistency(p, rset))
        line = data.line if data is not None else None
        bounds = _stage(rep, "bounds", lambda: check_bounds(p, with_gamma=with_gamma, line=line), times)
        if bounds is not None:
            rep.extend(bounds.entries)
        if oracle:
            entries = _stage(rep, "oracle", lambda: cross_validate(p), times)
            if entries is not None:
                rep.extend(entries)
    if timings:
        rep.metadata["timings"] = times
    return rep
