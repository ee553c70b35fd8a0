from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from finitary import stats
from finitary.errors import InsufficientSample


def test_pool_tail_merges_small_cells():
    obs, exp = stats.pool_tail([50, 30, 15, 4, 1], [0.5, 0.3, 0.15, 0.04, 0.01], 100)
    assert obs == [50, 30, 15, 5]
    assert exp == pytest.approx([50, 30, 15, 5])
    obs, exp = stats.pool_tail([1, 9, 90], [0.01, 0.09, 0.9], 100)
    assert obs == [10, 90] and exp == pytest.approx([10, 90])


def test_poisson_counts_pools_at_six():
    counts = [k % 8 for k in range(4000)]
    res = stats.poisson_counts("x", counts, 1.0)
    assert res.n == 4000 and res.p_value < 1e-6


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(0, 1, max_denominator=1 << 20), min_size=1, max_size=60))
def test_exact_ks_distance_matches_scipy(values):
    d = stats.ks_distance_uniform(values, Fraction(0), Fraction(1))
    ref = sps.kstest([float(v) for v in values], "uniform").statistic
    assert float(d) == pytest.approx(ref, abs=1e-12)


def test_ks_uniform_rescales_interval():
    rng = random.Random(3)
    values = [Fraction(rng.getrandbits(40), 1 << 39) - 1 for _ in range(5000)]
    assert stats.ks_uniform("u", values, -1, 1).p_value >= 1e-3
    shifted = [v / 2 for v in values]
    assert stats.ks_uniform("u", shifted, -1, 1).p_value < 1e-6


def test_contingency_detects_dependence_and_rejects_small_tables():
    pairs = [(k % 2, k % 2) for k in range(200)]
    assert stats.contingency("c", pairs).p_value < 1e-6
    with pytest.raises(InsufficientSample):
        stats.contingency("c", pairs[:10])
    with pytest.raises(InsufficientSample):
        stats.contingency("c", [(0, k % 2) for k in range(100)])


def test_categorical_and_exponential():
    rng = random.Random(5)
    symbols = [rng.choice("aab") for _ in range(3000)]
    assert stats.categorical("m", symbols, ["a", "b"], [Fraction(2, 3), Fraction(1, 3)]).p_value >= 1e-3
    gaps = [rng.expovariate(2.0) for _ in range(3000)]
    assert stats.ks_exponential("g", gaps, 2.0).p_value >= 1e-3
    assert stats.ks_exponential("g", gaps, 1.0).p_value < 1e-6
