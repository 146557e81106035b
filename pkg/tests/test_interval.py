import math

import numpy as np
import pytest
from hypothesis import given

from jostspec import report
from jostspec.corpus import random_corpus
from jostspec.interval import (DIRICHLET, MIXED01, MIXED10, NEUMANN, PERIODIC, all_spectra, characteristic,
                               check_interlacing, count_below, count_negative, interval_eigenvalues,
                               periodic_spectrum)
from jostspec.oracle import discretize, oracle_spectrum
from jostspec.potential import Potential

from conftest import staircases

PI2 = math.pi**2


def test_free_closed_forms(free):
    n = np.arange(1, 11)
    np.testing.assert_allclose(interval_eigenvalues(free, DIRICHLET, 10).eigenvalues(), PI2 * n**2, rtol=1e-9)
    nu = interval_eigenvalues(free, NEUMANN, 11).eigenvalues()
    assert abs(nu[0]) < 1e-9
    np.testing.assert_allclose(nu[1:], PI2 * n**2, rtol=1e-9)
    for fam in (MIXED01, MIXED10):
        np.testing.assert_allclose(interval_eigenvalues(free, fam, 10).eigenvalues(), PI2 * (n - 0.5) ** 2, rtol=1e-9)
    per = periodic_spectrum(free, 10).by_label()
    assert abs(per["0+"]) < 1e-9
    for k in n:
        assert per[f"{k}-"] == pytest.approx(PI2 * k * k, rel=1e-9)
        assert per[f"{k}+"] == pytest.approx(PI2 * k * k, rel=1e-9)


@pytest.mark.parametrize("v", [-40.0, 12.0])
def test_constant_shift(v):
    mu = interval_eigenvalues(Potential.constant(v), DIRICHLET, 4).eigenvalues()
    np.testing.assert_allclose(mu, PI2 * np.arange(1, 5) ** 2 + v, rtol=1e-10)


@given(staircases())
def test_count_matches_roots(p):
    for fam in (DIRICHLET, NEUMANN, MIXED01, MIXED10):
        ev = interval_eigenvalues(p, fam, 4)
        vals = ev.eigenvalues()
        assert all(np.diff(vals) > 0)
        for i, lam in enumerate(vals):
            assert count_below(p, fam, lam - 1e-7 * max(1, abs(lam))) == i
            assert count_below(p, fam, lam + 1e-7 * max(1, abs(lam))) == i + 1
        assert all(e.residual <= 1e-8 for e in ev.values)


@given(staircases())
def test_eigenvalues_are_characteristic_zeros(p):
    for fam in (DIRICHLET, MIXED01):
        for lam in interval_eigenvalues(p, fam, 3).eigenvalues():
            assert abs(characteristic(p, fam, lam)) < 1e-8


@given(staircases())
def test_periodic_ordering(p):
    per = periodic_spectrum(p, 5)
    vals = [e.value for e in per.values]
    assert all(b >= a - 1e-9 * max(1, abs(a)) for a, b in zip(vals, vals[1:]))
    assert per.gamma == pytest.approx(math.sqrt(sum(g * g for g in per.gaps)))


def test_periodic_against_finite_differences():
    p = random_corpus(42, 1)[0]
    ref = sorted(periodic_spectrum(p, 3).eigenvalues())[:5]
    fd = oracle_spectrum(discretize(p, "periodic", 4096), 5)
    np.testing.assert_allclose(fd, ref, atol=2e-4)
    per = periodic_spectrum(p, 2).by_label()
    assert per["0+"] < per["1-"] <= per["1+"] < per["2-"]


def test_symmetric_potential_opens_gaps():
    # symmetric about 1/2: mu_n and nu_n land on opposite gap edges
    p = Potential.piecewise_constant([0, 0.25, 0.75, 1], [5.0, -10.0, 5.0])
    per = periodic_spectrum(p, 3)
    fd = oracle_spectrum(discretize(p, "periodic", 4096), 7)
    np.testing.assert_allclose(sorted(per.eigenvalues())[:7], fd, atol=1e-3)
    assert per.gaps[0] > 1.0


@pytest.mark.parametrize("fam", [DIRICHLET, NEUMANN, MIXED01, MIXED10, PERIODIC])
def test_count_negative_agrees_with_spectrum(fam):
    for p in random_corpus(3, 5):
        n = count_negative(p, fam)
        if fam == PERIODIC:
            vals = periodic_spectrum(p, n // 2 + 2).eigenvalues()
        else:
            vals = interval_eigenvalues(p, fam, n + 2).eigenvalues()
        assert n == sum(v < 0 for v in vals)


def test_interlacing_entries_on_free():
    entries = check_interlacing(Potential.zero(), 4)
    assert all(e.status == report.PASS for e in entries)
    assert {e.theorem for e in entries} == {"bx", "periodic"}


def test_all_spectra_lengths():
    s = all_spectra(Potential.constant(-4.0), 5)
    assert len(s[DIRICHLET]) == 6 and len(s[MIXED01]) == 5 and len(s[PERIODIC]) == 11


def test_bad_family():
    with pytest.raises(ValueError):
        interval_eigenvalues(Potential.zero(), "robin", 3)
