from fractions import Fraction

import pytest

from fpgmm.costmodel import (
    SearchLimits,
    certify_optimal,
    fpgmm_metrics,
    mrfpmm_metrics,
    optimize_tradeoff,
    tradeoff_csv_rows,
    TRADEOFF_CSV_HEADER,
)


def test_grouped_scheme_regression_values():
    two_groups = fpgmm_metrics(m=1, n=2, r=2, t=1, s_size=2)
    assert two_groups.recovery_threshold == 7
    assert two_groups.ndc == Fraction(7, 4)
    assert two_groups.ncc == Fraction(1, 2)
    one_group = fpgmm_metrics(m=1, n=2, r=1, t=1, s_size=2)
    assert one_group.recovery_threshold == 9
    assert one_group.ndc == Fraction(9, 4)
    assert one_group.ncc == Fraction(1, 4)


def test_grouped_scheme_unit_parameters():
    unit = fpgmm_metrics(1, 1, 1, 1, 1)
    assert (unit.recovery_threshold, unit.ndc, unit.ncc) == (3, Fraction(3), Fraction(1))


def test_grouped_scheme_divisibility():
    with pytest.raises(ValueError):
        fpgmm_metrics(1, 1, 3, 1, 2)
    with pytest.raises(ValueError):
        fpgmm_metrics(0, 1, 1, 1, 1)


def test_ndc_times_smn_is_threshold():
    for m, n, r, t, s in [(1, 2, 2, 1, 2), (2, 2, 4, 2, 3), (3, 4, 6, 1, 5)]:
        cost = fpgmm_metrics(m, n, r, t, s)
        assert cost.ndc * s * m * n == cost.recovery_threshold


def test_multiround_unit_case():
    unit = mrfpmm_metrics(1, 1, 1, 1, 1)
    assert unit.recovery_threshold == 3
    assert unit.ndc == Fraction(3)
    assert unit.ncc == Fraction(1)


def test_multiround_branch_min_by_hand():
    # (m+1)(np+T)-1 = 3*5-1 = 14, symmetric branch 14, 2mnp+2T-1 = 17
    cost = mrfpmm_metrics(2, 2, 2, 1, 1)
    assert cost.recovery_threshold == 14


def test_multiround_symmetry():
    for m, n, p, t in [(2, 3, 4, 1), (1, 5, 2, 2), (6, 2, 3, 1)]:
        assert mrfpmm_metrics(m, n, p, t, 1).recovery_threshold == \
            mrfpmm_metrics(n, m, p, t, 1).recovery_threshold


def test_multiround_carries_privacy_caveat():
    assert "cardinality" in mrfpmm_metrics(1, 1, 1, 1, 1).caveat


def test_optimizer_monotone_in_bound():
    limits = SearchLimits(m_max=8, n_max=8, p_max=8)
    bounds = [Fraction(1, 100), Fraction(1, 20), Fraction(1, 5), Fraction(1)]
    for scheme in ("fpgmm", "mrfpmm"):
        ndcs = []
        for b in bounds:
            pt = optimize_tradeoff(scheme, b, worker_cap=200, t=1, s_size=2, limits=limits)
            if pt.feasible:
                ndcs.append(pt.ndc)
        assert all(a >= b for a, b in zip(ndcs, ndcs[1:]))


def test_optimizer_cap_relaxation_pointwise():
    limits = SearchLimits(m_max=10, n_max=10, p_max=10)
    for b in [Fraction(1, 50), Fraction(1, 10), Fraction(1, 2)]:
        lo = optimize_tradeoff("fpgmm", b, 300, 1, 5, limits)
        hi = optimize_tradeoff("fpgmm", b, 600, 1, 5, limits)
        if lo.feasible:
            assert hi.feasible and hi.ndc <= lo.ndc


def test_optimizer_respects_constraints():
    limits = SearchLimits(m_max=6, n_max=6, p_max=6)
    pt = optimize_tradeoff("fpgmm", Fraction(1, 8), 100, 1, 2, limits)
    assert pt.feasible
    assert pt.ncc <= Fraction(1, 8)
    assert pt.recovery_threshold <= 100
    m, n, r = pt.params
    assert (m * n) % r == 0


def test_optimizer_matches_brute_force_fractions():
    # independent recount with Fraction comparisons over the whole box
    limits = SearchLimits(m_max=5, n_max=5, p_max=5)
    for scheme in ("fpgmm", "mrfpmm"):
        for bound in (Fraction(1, 25), Fraction(1, 4), Fraction(2)):
            pt = optimize_tradeoff(scheme, bound, 80, 1, 3, limits)
            assert certify_optimal(pt, limits)


def test_optimizer_infeasible_result():
    limits = SearchLimits(m_max=2, n_max=2, p_max=2)
    pt = optimize_tradeoff("fpgmm", Fraction(1, 10**6), 5, 1, 3, limits)
    assert not pt.feasible
    assert pt.params is None and pt.ndc is None
    assert certify_optimal(pt, limits)


def test_optimizer_tie_break_deterministic():
    limits = SearchLimits(m_max=4, n_max=4, p_max=4)
    a = optimize_tradeoff("mrfpmm", Fraction(1), 1000, 1, 1, limits)
    b = optimize_tradeoff("mrfpmm", Fraction(1), 1000, 1, 1, limits)
    assert a == b


def test_csv_rows_schema():
    limits = SearchLimits(m_max=4, n_max=4, p_max=4)
    pts = [
        optimize_tradeoff("fpgmm", Fraction(1, 4), 50, 1, 2, limits),
        optimize_tradeoff("fpgmm", Fraction(1, 10**9), 3, 1, 2, limits),
    ]
    rows = tradeoff_csv_rows(pts)
    assert TRADEOFF_CSV_HEADER.count(",") == rows[0].count(",")
    assert rows[0].endswith("true")
    assert rows[1].endswith("false")
