import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jostspec.potential import Potential
from jostspec.transfer import asymptotic_residuals, entries, fundamental_matrix, lyapunov, prufer_state

from conftest import staircases


def constant_entries(v, lam):
    """theta, phi, theta', phi' at x = 1 for q = v, independent of the propagator."""
    z = complex(lam - v)
    r = np.sqrt(z)
    if abs(r) < 1e-12:
        return 1.0, 1.0, 0.0, 1.0
    return np.cos(r), np.sin(r) / r, -r * np.sin(r), np.cos(r)


@pytest.mark.parametrize("v", [0.0, -4.0, 7.5])
@pytest.mark.parametrize("lam", [-50.0, -4.0, 0.0, 3.0, 1e2, 9.9e3, 2 + 3j])
def test_constant_potential_closed_form(v, lam):
    got = entries(Potential.constant(v), lam)
    want = constant_entries(v, lam)
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-11 * max(1.0, abs(w))


@given(staircases(), st.floats(-100, 1e4))
def test_wronskian_invariant(p, lam):
    assert fundamental_matrix(p, lam).det_error() <= 1e-12


@given(staircases(), st.floats(-30, 300), st.floats(-10, 10))
def test_conjugate_symmetry_and_reality(p, a, b):
    m = fundamental_matrix(p, complex(a, b)).entries
    mc = fundamental_matrix(p, complex(a, -b)).entries
    np.testing.assert_allclose(m, np.conj(mc), rtol=1e-12, atol=1e-12)
    real = entries(p, a)
    assert all(isinstance(x, float) for x in real)


def test_vectorised_matches_scalar():
    p = Potential.piecewise_poly([0, 0.4, 1], [[1.0, 2.0], [-3.0, 0.0, 5.0]])
    lams = np.array([-5.0, 0.5, 40.0])
    th, ph, dth, dph = entries(p, lams)
    for i, lam in enumerate(lams):
        s = entries(p, float(lam))
        np.testing.assert_allclose([th[i], ph[i], dth[i], dph[i]], s, rtol=1e-10, atol=1e-12)


def test_polynomial_cells_converge():
    # q = 2x: compare with a fine staircase computed in closed form layer by layer
    p = Potential.piecewise_poly([0, 1], [[0.0, 2.0]])
    fine = Potential.piecewise_constant(np.linspace(0, 1, 4097), 2 * (np.arange(4096) + 0.5) / 4096)
    a, b = entries(p, 7.0), entries(fine, 7.0)
    np.testing.assert_allclose(a, b, atol=1e-6)


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        fundamental_matrix(Potential.zero(), float("nan"))


def test_lyapunov_free():
    assert lyapunov(Potential.zero(), (2 * math.pi) ** 2) == pytest.approx(1.0)
    assert lyapunov(Potential.zero(), math.pi**2) == pytest.approx(-1.0)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_prufer_zero_count(n):
    # phi(x, lam) for q = 0 has n zeros in (0, 1] right after lam = (n pi)^2
    zeros, alpha = prufer_state(Potential.zero(), (n * math.pi) ** 2 + 1e-6)
    assert zeros == n and alpha < 1e-3


def test_asymptotic_residuals_bounded():
    p = Potential.piecewise_constant([0, 0.3, 1], [-10.0, 6.0])
    rows = asymptotic_residuals(p, [1e2, 1e3, 1e4, 1e5, 1e6])
    for col in ("phi", "dphi", "theta", "dtheta"):
        vals = [getattr(r, col) for r in rows]
        assert max(vals) <= 2 * max(vals[0], 1.0) + 20
    with pytest.raises(ValueError):
        asymptotic_residuals(p, [50.0])


def test_free_negative_lambda_closed_form(free):
    assert entries(free, -100.0)[1] == pytest.approx(math.sinh(10) / 10, rel=1e-13)


def test_entries_grow_as_lambda_goes_to_minus_infinity():
    from jostspec.corpus import random_corpus
    for p in random_corpus(1, 5):
        assert all(x > 1e6 for x in entries(p, -1e4))


def test_free_residuals_vanish(free):
    for row in asymptotic_residuals(free, [1e2, 1e4]):
        assert max(row.phi, row.dphi, row.theta, row.dtheta) < 1e-6


def test_theta_residual_at_large_lambda():
    from jostspec.corpus import random_corpus
    for p in random_corpus(2, 5):
        row = asymptotic_residuals(p, [1e6])[0]
        assert row.theta <= 10.0  # |theta - cos r| <= 10 / sqrt(lam)


@given(staircases(), st.floats(-50, 500), st.floats(-10, 10))
def test_shift_law(p, lam, eps):
    from jostspec.potential import shift
    a = fundamental_matrix(shift(p, eps), lam).entries
    b = fundamental_matrix(p, lam + eps).entries
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-10 * np.abs(b).max())


@given(st.floats(-1e3, 1e6), st.floats(-1e3, 1e3))
@settings(max_examples=40)
def test_wronskian_invariant_complex_polynomial(a, b):
    p = Potential.piecewise_poly([0, 0.5, 1], [[1.0, -4.0, 3.0], [-2.0, 0.0, 0.0, 8.0]])
    assert fundamental_matrix(p, complex(a, b)).det_error() <= 1e-12
