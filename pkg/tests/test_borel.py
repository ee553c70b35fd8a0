from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from finitary.borel import MarkDistribution, digit_step, extract, inject
from finitary.errors import AlphabetMismatch

HALF = MarkDistribution.from_probs([Fraction(1, 2), Fraction(1, 2)])
THIRDS = MarkDistribution.from_probs([Fraction(1, 3), Fraction(2, 3)])


def oracle_extract(u: Fraction, k: int, probs: list[Fraction]):
    """Digit expansion straight from the interval ladder, one Fraction at a time."""
    marks = []
    for _ in range(k):
        left = Fraction(0)
        for i, p in enumerate(probs):
            if left <= u < left + p:
                marks.append(i)
                u = (u - left) / p
                break
            left += p
    return u, marks


distributions = st.lists(st.integers(1, 9), min_size=1, max_size=5).map(
    lambda ws: MarkDistribution.from_probs([Fraction(w, sum(ws)) for w in ws]))
units = st.fractions(min_value=0, max_value=1, max_denominator=1 << 40).filter(lambda u: u < 1)


def test_distribution_validation():
    with pytest.raises(ValueError):
        MarkDistribution.from_probs([Fraction(1), Fraction(0)])
    with pytest.raises(ValueError):
        MarkDistribution.from_probs([Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(ValueError):
        MarkDistribution(("a", "a"), (Fraction(1, 2), Fraction(1, 2)))
    assert THIRDS.ladder == (0, Fraction(1, 3))


def test_digit_step_examples():
    assert digit_step(Fraction(0), HALF) == ("0", 0)
    assert digit_step(Fraction(3, 4), HALF) == ("1", Fraction(1, 2))
    assert digit_step(Fraction(5, 9), THIRDS) == ("1", Fraction(1, 3))
    # the boundary belongs to the upper interval
    assert digit_step(Fraction(1, 3), THIRDS) == ("1", 0)


def test_extract_and_inject_examples():
    assert extract(Fraction(2, 7), 0, THIRDS) == (Fraction(2, 7), [])
    assert extract(Fraction(5, 9), 2, THIRDS) == (0, ["1", "1"])
    assert inject(Fraction(0), ["1", "1"], THIRDS) == Fraction(5, 9)
    assert inject(Fraction(3, 11), [], THIRDS) == Fraction(3, 11)
    # binary digits for the fair coin
    assert extract(Fraction(0b101, 8), 2, HALF)[1] == ["1", "0"]


def test_inject_rejects_unknown_symbol():
    with pytest.raises(AlphabetMismatch):
        inject(Fraction(0), ["2"], HALF)


def test_unit_value_checked():
    with pytest.raises(ValueError):
        extract(Fraction(1), 1, HALF)
    with pytest.raises(ValueError):
        inject(Fraction(-1, 2), [], HALF)


@settings(max_examples=300, deadline=None)
@given(distributions, units, st.integers(0, 12))
def test_extract_matches_oracle_and_inverts(dist, u, k):
    residual, marks = extract(u, k, dist)
    r0, idx0 = oracle_extract(u, k, list(dist.probs))
    assert residual == r0
    assert marks == [dist.alphabet[i] for i in idx0]
    assert 0 <= residual < 1
    assert inject(residual, marks, dist) == u


@settings(max_examples=200, deadline=None)
@given(units, st.integers(2, 8))
def test_permuted_marks_usually_break_the_round_trip(u, k):
    residual, marks = extract(u, k, THIRDS)
    permuted = marks[::-1]
    if permuted != marks:
        assert inject(residual, permuted, THIRDS) != u


def test_measure_preservation():
    rng = random.Random(2024)
    n, k = 100_000, 3
    words, residuals, pairs = [], [], []
    for _ in range(n):
        u = Fraction(rng.getrandbits(64), 1 << 64)
        r, marks = extract(u, k, THIRDS)
        words.append("".join(marks))
        residuals.append(float(r))
        pairs.append((marks[0], min(int(r * 4), 3)))
    cats = [format(i, "03b") for i in range(8)]
    expected = [float(np.prod([THIRDS.probs[int(c)] for c in w])) * n for w in cats]
    observed = [words.count(w) for w in cats]
    assert stats.chisquare(observed, expected).pvalue >= 1e-3
    assert stats.kstest(residuals, "uniform").pvalue >= 1e-3
    table = np.zeros((2, 4), dtype=int)
    for m, b in pairs:
        table[int(m), b] += 1
    assert stats.chi2_contingency(table, correction=False).pvalue >= 1e-3
