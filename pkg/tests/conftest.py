import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jostspec.potential import Potential

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@st.composite
def staircases(draw, max_cells=6, low=-30.0, high=20.0):
    """Piecewise-constant potentials with random breakpoints and values."""
    n = draw(st.integers(1, max_cells))
    cuts = draw(st.lists(st.floats(0.05, 0.95), min_size=n - 1, max_size=n - 1, unique=True))
    bp = np.array([0.0] + sorted(cuts) + [1.0])
    if np.any(np.diff(bp) < 1e-3):
        bp = np.linspace(0.0, 1.0, n + 1)
    vals = draw(st.lists(st.floats(low, high), min_size=n, max_size=n))
    return Potential.piecewise_constant(bp, vals)


@pytest.fixture
def well():
    return Potential.constant(-4.0)


@pytest.fixture
def free():
    return Potential.zero()


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record the outcome line of an acceptance criterion; returns ``ok``."""
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
