import math
import pickle

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jostspec.potential import (Potential, PotentialParseError, even_extension, even_extension_rescaled,
                                functionals, periodic_extension, shift, staircase)

from conftest import staircases


def test_evaluate_cells_and_outside():
    p = Potential.piecewise_constant([0, 0.5, 1], [2.0, -3.0])
    assert p(0.25) == 2.0
    assert p(0.5) == -3.0  # right limit at an interior breakpoint
    assert p(1.0) == -3.0
    assert p(-0.1) == 0.0 and p(1.5) == 0.0
    np.testing.assert_array_equal(p(np.array([0.1, 0.9])), [2.0, -3.0])


def test_polynomial_cell_uses_local_variable():
    p = Potential.piecewise_poly([0, 0.5, 1], [[0.0, 1.0], [1.0, 0.0, 4.0]])
    assert p(0.25) == pytest.approx(0.25)
    assert p(0.75) == pytest.approx(1.0 + 4 * 0.25**2)


@pytest.mark.parametrize("spec,field", [
    ({"kind": "piecewise_constant", "breakpoints": [0, 0.6, 0.4, 1], "values": [1, 2, 3]}, "breakpoints"),
    ({"kind": "piecewise_constant", "breakpoints": [0.1, 1], "values": [1]}, "breakpoints"),
    ({"kind": "piecewise_constant", "breakpoints": [0, 0.9], "values": [1]}, "breakpoints"),
    ({"kind": "piecewise_constant", "breakpoints": [0, 1], "values": [1, 2]}, "values"),
    ({"kind": "piecewise_constant", "breakpoints": [0, 1], "values": [float("nan")]}, "values"),
    ({"kind": "piecewise_poly", "breakpoints": [0, 1], "coeffs": [[1, 2, 3, 4, 5]]}, "coeffs"),
    ({"kind": "spline", "breakpoints": [0, 1], "values": [1]}, "kind"),
    ({"kind": "piecewise_constant", "values": [1]}, "breakpoints"),
])
def test_parse_errors_name_the_field(spec, field):
    with pytest.raises(PotentialParseError) as info:
        Potential.from_dict(spec)
    assert info.value.field == field
    assert str(info.value).startswith(field)


def test_immutable_and_picklable():
    p = Potential.piecewise_constant([0, 0.3, 1], [1.0, -2.0])
    with pytest.raises(AttributeError):
        p.kind = "x"
    with pytest.raises(ValueError):
        p.coeffs[0, 0] = 5.0
    assert pickle.loads(pickle.dumps(p)) == p


@given(staircases())
def test_dict_round_trip(p):
    assert Potential.from_dict(p.to_dict()) == p


def test_functionals_closed_form():
    p = Potential.piecewise_constant([0, 0.5, 1], [-4.0, 2.0])
    f = functionals(p)
    assert f.int_q == pytest.approx(-1.0)
    assert f.int_q_minus == pytest.approx(2.0)
    assert f.int_xq_minus == pytest.approx(4 * 0.125)
    assert f.int_sqrt_q_minus == pytest.approx(1.0)
    assert f.l2_norm == pytest.approx(math.sqrt(8 + 2))
    assert f.is_monotone and not f.is_nonpositive


def test_functionals_on_sign_changing_polynomial():
    # q = x - 1/2 on one cell: negative on [0, 1/2)
    p = Potential.piecewise_poly([0, 1], [[-0.5, 1.0]])
    f = functionals(p)
    assert f.int_q == pytest.approx(0.0, abs=1e-15)
    assert f.int_q_minus == pytest.approx(0.125)
    assert f.int_xq_minus == pytest.approx(1 / 48)
    assert f.int_sqrt_q_minus == pytest.approx(2 / 3 * 0.5**1.5, rel=1e-10)
    assert f.is_monotone


@given(staircases(), st.floats(-5, 5))
def test_shift_moves_mean(p, eps):
    assert functionals(shift(p, eps)).int_q == pytest.approx(functionals(p).int_q - eps, abs=1e-10)


def test_derived_potentials():
    p = Potential.piecewise_poly([0, 1], [[0.0, 1.0]])
    e = even_extension(p)
    assert e(-0.3) == pytest.approx(0.3) and e(0.3) == pytest.approx(0.3)
    per = periodic_extension(p)
    assert per(1.25) == pytest.approx(0.25)
    Q = even_extension_rescaled(p)
    s = np.linspace(0, 1, 11)
    np.testing.assert_allclose(Q(s), 4 * np.abs(2 * s - 1), atol=1e-14)


def test_staircase_preserves_mean():
    p = Potential.piecewise_poly([0, 1], [[1.0, 0.0, 3.0]])
    s = staircase(p, 256)
    assert s.is_piecewise_constant and s.n_cells == 256
    assert functionals(s).int_q == pytest.approx(2.0, abs=1e-5)
    assert staircase(Potential.constant(3.0)) == Potential.constant(3.0)
