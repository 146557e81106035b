import math

import pytest

from jostspec import report
from jostspec.bounds import TruncationInsufficient, check_bounds, gap_estimate
from jostspec.corpus import monotone_corpus, random_corpus, smooth_mean_zero_corpus
from jostspec.oracle import discretize, sturm_count
from jostspec.potential import Potential


def by_statement(entries, theorem):
    return [e for e in entries if e.theorem == theorem]


def test_well_bounds_hold(well):
    b = check_bounds(well, with_gamma=False)
    assert all(e.status in (report.PASS, report.SKIPPED) for e in b.entries)
    assert b.inputs["n0"] == 0 and b.inputs["n01"] == 1
    # a constant is monotone and its negative part nonincreasing
    assert [e.status for e in by_statement(b.entries, "nu3")] == [report.PASS]
    assert [e.status for e in by_statement(b.entries, "nu3-cc")] == [report.PASS]


def test_sums_on_deep_well():
    b = check_bounds(Potential.constant(-40.0), with_gamma=False)
    # mu_1 = pi^2 - 40 and mu_2 = 4 pi^2 - 40
    assert b.inputs["S_mu"] == pytest.approx(math.sqrt(40 - math.pi**2) + math.sqrt(40 - 4 * math.pi**2), rel=1e-9)


def test_nonmonotone_skips_with_reason():
    p = Potential.piecewise_constant([0, 0.4, 0.7, 1], [1.0, -3.0, 2.0])
    e = by_statement(check_bounds(p, with_gamma=False).entries, "nu3")[0]
    assert e.status == report.SKIPPED and "monotone" in e.note


def test_lower_counting_link_reported_as_fail():
    # lambda_0^+ and lambda_1^- are negative while mu_1 > 0: the left link of
    # the counting chain reads 1/2 <= 0. The FD matrices agree on both counts.
    p = random_corpus(42, 2)[1]
    e = check_bounds(p, with_gamma=False).entries[0]
    assert (e.left, e.right, e.status) == (0.5, 0, report.FAIL)
    assert sturm_count(discretize(p, "periodic", 2048), 0.0) == 2
    assert sturm_count(discretize(p, "dirichlet", 2048), 0.0) == 0


def test_increasing_staircase_can_break_monotone_bound():
    fails = [p for p in monotone_corpus(7, 25)
             if by_statement(check_bounds(p, with_gamma=False).entries, "nu3")[0].status == report.FAIL]
    assert fails
    for p in fails:
        # q_- is not nonincreasing there, so the stricter variant is skipped
        cc = by_statement(check_bounds(p, with_gamma=False).entries, "nu3-cc")[0]
        assert cc.status == report.SKIPPED


def test_gap_estimate_free_is_zero(free):
    est = gap_estimate(free)
    assert est.gamma == 0.0 and est.tail_ok


def test_gap_estimate_smooth_mean_zero():
    p = smooth_mean_zero_corpus(11, 1)[0]
    est = gap_estimate(p)
    assert est.tail_ok and est.n_gaps == 64
    assert abs(est.shift) < 1e-12
    assert est.norm <= est.rhs_2gamma
    assert est.gamma <= est.rhs_norm


def test_step_potential_needs_too_many_gaps():
    p = Potential.piecewise_constant([0, 0.5, 1], [3.0, -3.0])
    with pytest.raises(TruncationInsufficient):
        gap_estimate(p)
    skipped = [e for e in check_bounds(p).entries if e.theorem in ("nu2x", "esg1")]
    assert skipped and all(e.status == report.SKIPPED for e in skipped)


def test_nonzero_mean_is_labelled():
    p = smooth_mean_zero_corpus(11, 1)[0]
    from jostspec.potential import shift
    entries = [e for e in check_bounds(shift(p, -2.0)).entries if e.theorem == "nu2x"]
    assert entries and all("c0 = 2" in e.statement for e in entries)
