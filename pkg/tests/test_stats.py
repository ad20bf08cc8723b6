import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urbanmix.stats import (StatsError, apply_holm, holm_bonferroni,
                            student_t_two_sided_p, welch_t_test)
from urbanmix.stats import TestResult as TResult

mpmath.mp.dps = 40


def mp_two_sided_p(t, dof):
    x = mpmath.mpf(dof) / (dof + mpmath.mpf(t) ** 2)
    return float(mpmath.betainc(mpmath.mpf(dof) / 2, mpmath.mpf("0.5"),
                                0, x, regularized=True))


def holm_oracle(p_values, alpha):
    """Literal step-down procedure on (p, index) pairs."""
    m = len(p_values)
    indexed = sorted(range(m), key=lambda i: p_values[i])
    reject = [False] * m
    for rank, i in enumerate(indexed):
        if p_values[i] <= alpha / (m - rank):
            reject[i] = True
        else:
            break
    return reject


def test_p_value_against_high_precision_beta():
    rng = np.random.default_rng(21)
    for _ in range(100):
        t = float(rng.uniform(-6.0, 6.0))
        dof = float(rng.uniform(1.0, 400.0))
        assert student_t_two_sided_p(t, dof) == pytest.approx(
            mp_two_sided_p(t, dof), abs=1e-9)


def test_p_value_limits():
    assert student_t_two_sided_p(0.0, 10.0) == 1.0
    assert student_t_two_sided_p(math.inf, 10.0) == 0.0
    assert student_t_two_sided_p(1e6, 10.0) < 1e-12
    with pytest.raises(StatsError, match="degrees of freedom"):
        student_t_two_sided_p(1.0, 0.0)


def test_p_value_symmetric_in_t():
    assert student_t_two_sided_p(2.5, 7.0) == student_t_two_sided_p(-2.5, 7.0)


def test_welch_known_example():
    # classic unequal-variance pair; dof from Welch-Satterthwaite
    a = np.array([27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6,
                  23.1, 19.6, 19.0, 21.7, 21.4])
    b = np.array([27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2,
                  21.9, 22.1, 22.9, 30.5, 22.2])
    res = welch_t_test(a, b)
    sa2 = a.var(ddof=1) / len(a)
    sb2 = b.var(ddof=1) / len(b)
    t_expected = (a.mean() - b.mean()) / math.sqrt(sa2 + sb2)
    dof_expected = (sa2 + sb2) ** 2 / (sa2 ** 2 / 14 + sb2 ** 2 / 14)
    assert res.t_stat == pytest.approx(t_expected, rel=1e-12)
    assert res.dof == pytest.approx(dof_expected, rel=1e-12)
    assert res.p_value == pytest.approx(mp_two_sided_p(res.t_stat, res.dof),
                                        abs=1e-12)
    assert not res.untestable


def test_welch_equal_means_large_p():
    rng = np.random.default_rng(4)
    a = rng.normal(10.0, 1.0, 500)
    b = rng.normal(10.0, 3.0, 50)
    res = welch_t_test(a, b)
    assert res.p_value > 0.01
    assert res.dof < 548


def test_pooled_variant_uses_fixed_dof():
    rng = np.random.default_rng(8)
    a = rng.normal(0.0, 1.0, 20)
    b = rng.normal(0.5, 2.0, 12)
    res = welch_t_test(a, b, pooled=True)
    assert res.dof == 30
    sp2 = (19 * a.var(ddof=1) + 11 * b.var(ddof=1)) / 30
    t_expected = (a.mean() - b.mean()) / math.sqrt(sp2 * (1 / 20 + 1 / 12))
    assert res.t_stat == pytest.approx(t_expected, rel=1e-12)


def test_untestable_small_samples():
    assert welch_t_test(np.array([1.0]), np.array([1.0, 2.0])).untestable
    assert welch_t_test(np.array([1.0, 2.0]), np.array([])).untestable
    assert welch_t_test(np.array([]), np.array([])).untestable


def test_untestable_zero_variance():
    res = welch_t_test(np.array([2.0, 2.0, 2.0]), np.array([5.0, 5.0]))
    assert res.untestable
    assert res.p_value == 1.0
    assert math.isnan(res.t_stat)


def test_constant_but_different_samples_pooled():
    res = welch_t_test(np.array([2.0, 2.0]), np.array([5.0, 5.0]), pooled=True)
    assert res.untestable


def test_rejects_multidimensional():
    with pytest.raises(StatsError, match="one-dimensional"):
        welch_t_test(np.ones((2, 2)), np.ones(4))


def test_holm_worked_example():
    # alpha=0.05, m=3: thresholds 0.05/3, 0.05/2, 0.05/1 -> all reject
    flags = holm_bonferroni([0.01, 0.02, 0.04], alpha=0.05)
    assert flags.tolist() == [True, True, True]


def test_holm_stops_at_first_failure():
    # 0.03 > 0.05/2 stops the walk, so the later 0.04 stays accepted
    flags = holm_bonferroni([0.01, 0.03, 0.04], alpha=0.05)
    assert flags.tolist() == [True, False, False]


def test_holm_none_reject():
    flags = holm_bonferroni([0.9, 0.8, 0.7], alpha=0.05)
    assert not flags.any()


def test_holm_input_order_preserved():
    flags = holm_bonferroni([0.04, 0.01, 0.02], alpha=0.05)
    assert flags.tolist() == [True, True, True]
    flags = holm_bonferroni([0.04, 0.01, 0.9], alpha=0.05)
    assert flags.tolist() == [False, True, False]


def test_holm_validation():
    with pytest.raises(StatsError, match="within"):
        holm_bonferroni([0.5, 1.5])
    with pytest.raises(StatsError, match="within"):
        holm_bonferroni([0.5, float("nan")])
    with pytest.raises(StatsError, match="one-dimensional"):
        holm_bonferroni(np.ones((2, 2)))


def test_holm_against_oracle_random_families():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        m = int(rng.integers(1, 40))
        p = rng.uniform(0.0, 1.0, m)
        # sprinkle ties and boundary values
        if m > 3:
            p[1] = p[0]
            p[2] = 1.0
        alpha = float(rng.uniform(0.005, 0.2))
        got = holm_bonferroni(p, alpha=alpha).tolist()
        assert got == holm_oracle(list(p), alpha)


def test_holm_monotone_in_alpha():
    rng = np.random.default_rng(23)
    p = rng.uniform(0, 1, 50)
    loose = holm_bonferroni(p, alpha=0.2)
    tight = holm_bonferroni(p, alpha=0.01)
    assert (tight <= loose).all()


def test_apply_holm_counts_untestable_as_one():
    results = [
        TResult(t_stat=5.0, dof=50.0, p_value=1e-6),
        TResult(t_stat=float("nan"), dof=float("nan"), p_value=1.0,
                   untestable=True),
        TResult(t_stat=4.0, dof=80.0, p_value=1e-4),
    ]
    corrected = apply_holm(results, alpha=0.05)
    assert corrected[0].reject
    assert corrected[2].reject
    assert not corrected[1].reject
    assert corrected[1].untestable
    # thresholds divide by the full family size including untestable entries
    border = [TResult(t_stat=2.0, dof=10.0, p_value=0.03),
              TResult(t_stat=float("nan"), dof=float("nan"), p_value=1.0,
                         untestable=True)]
    corrected = apply_holm(border, alpha=0.05)
    assert not corrected[0].reject  # 0.03 > 0.05/2


def test_apply_holm_family_of_121():
    rng = np.random.default_rng(31)
    results = [TResult(t_stat=1.0, dof=10.0, p_value=float(p))
               for p in rng.uniform(0, 1, 121)]
    corrected = apply_holm(results, alpha=0.05)
    flags = holm_oracle([r.p_value for r in results], 0.05)
    assert [r.reject for r in corrected] == flags


@settings(max_examples=100)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1,
                max_size=30),
       st.floats(min_value=0.001, max_value=0.5))
def test_holm_matches_oracle_property(p, alpha):
    got = holm_bonferroni(p, alpha=alpha).tolist()
    assert got == holm_oracle(p, alpha)


@settings(max_examples=60)
@given(st.floats(min_value=-30.0, max_value=30.0),
       st.floats(min_value=0.5, max_value=1000.0))
def test_p_value_in_unit_interval(t, dof):
    p = student_t_two_sided_p(t, dof)
    assert 0.0 <= p <= 1.0
