import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jostspec import report
from jostspec.oracle import (DiscretizedOperator, _counts, cross_validate, discretize, negative_box_spectrum,
                             oracle_spectrum, sturm_count)
from jostspec.potential import Potential

WELL_T, WELL_LINE = -0.4071014836413114, -1.8150126634413126


def dense(op: DiscretizedOperator) -> np.ndarray:
    A = np.diag(op.diag) + np.diag(op.off, 1) + np.diag(op.off, -1)
    if op.corner is not None:
        A[0, -1] = A[-1, 0] = op.corner
    return A


@given(st.integers(3, 30), st.integers(0, 2**32 - 1), st.booleans())
def test_inertia_count_matches_dense(m, seed, cyclic):
    rng = np.random.default_rng(seed)
    op = DiscretizedOperator(m, (0, 1), "test", 1.0, rng.normal(size=m), rng.normal(size=m - 1),
                             float(rng.normal()) if cyclic else None)
    ev = np.linalg.eigvalsh(dense(op))
    lams = rng.uniform(ev[0] - 1, ev[-1] + 1, 20)
    np.testing.assert_array_equal(_counts(op, lams), [(ev < x).sum() for x in lams])


def test_periodic_free_spectrum():
    ev = oracle_spectrum(discretize(Potential.zero(), "periodic", 1024), 5)
    np.testing.assert_allclose(ev, [0, np.pi**2, np.pi**2, 4 * np.pi**2, 4 * np.pi**2], atol=2e-3)


def test_interval_matches_dense():
    p = Potential.piecewise_constant([0, 0.5, 1], [-10.0, 4.0])
    for b in ("dirichlet", "neumann", "mixed01", "mixed10", "periodic"):
        op = discretize(p, b, 256)
        np.testing.assert_allclose(oracle_spectrum(op, 5), np.linalg.eigvalsh(dense(op))[:5], atol=1e-8)
        assert sturm_count(op, 50.0) == (np.linalg.eigvalsh(dense(op)) < 50.0).sum()


def test_well_half_line_box(well):
    assert negative_box_spectrum(well, "box-dirichlet", 3) == pytest.approx([WELL_T], abs=2e-3)


def test_well_line_box(well):
    assert negative_box_spectrum(well, "box-line", 3, n=16384) == pytest.approx([WELL_LINE], abs=2e-3)


def test_second_order_convergence():
    p = Potential.piecewise_constant([0, 0.25, 0.5, 1], [-20.0, 5.0, -3.0])
    exact = sorted(__import__("jostspec.interval", fromlist=["x"]).periodic_spectrum(p, 3).eigenvalues())[:5]
    errs = [np.abs(oracle_spectrum(discretize(p, "periodic", n), 5) - exact) for n in (512, 1024)]
    order = np.log2(errs[0] / errs[1])
    assert np.all((order > 1.7) & (order < 2.3))


def test_cross_validate_well(well):
    entries = cross_validate(well)
    assert entries and all(e.status != report.FAIL for e in entries)


def test_bad_arguments():
    with pytest.raises(ValueError):
        discretize(Potential.zero(), "robin", 512)
    with pytest.raises(ValueError):
        discretize(Potential.zero(), "dirichlet", 8)
    with pytest.raises(ValueError):
        oracle_spectrum(discretize(Potential.zero(), "dirichlet", 64), 20)
