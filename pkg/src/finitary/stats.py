"""Goodness-of-fit and independence tests used by the verification harness.

Test statistics are computed from exact counts (or exact rationals for the
uniform KS distance); p-values come from scipy's distribution functions.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np
from scipy import stats

from .errors import InsufficientSample

MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class StatResult:
    name: str
    statistic: float
    p_value: float
    n: int
    dof: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def pool_tail(observed: Sequence[int], probs: Sequence[float], n: int,
              min_expected: float = MIN_EXPECTED) -> tuple[list[int], list[float]]:
    """Merge categories from the right until every expected count reaches ``min_expected``."""
    obs, exp = list(observed), [p * n for p in probs]
    while len(exp) > 1 and exp[-1] < min_expected:
        o, e = obs.pop(), exp.pop()
        obs[-1] += o
        exp[-1] += e
    while len(exp) > 1 and exp[0] < min_expected:
        o, e = obs.pop(0), exp.pop(0)
        obs[0] += o
        exp[0] += e
    return obs, exp


def chisquare_gof(name: str, observed: Sequence[int], probs: Sequence[float]) -> StatResult:
    n = int(sum(observed))
    obs, exp = pool_tail(observed, probs, n)
    if len(obs) < 2:
        raise InsufficientSample(f"{name}: {n} observations leave fewer than two usable cells")
    res = stats.chisquare(obs, exp)
    return StatResult(name, float(res.statistic), float(res.pvalue), n, len(obs) - 1)


def poisson_counts(name: str, counts: Sequence[int], mean: float, tail: int = 6) -> StatResult:
    """Counts against Poisson(``mean``), the categories ``>= tail`` pooled."""
    hist = np.bincount(np.minimum(np.asarray(counts, dtype=np.int64), tail), minlength=tail + 1)
    pmf = [float(stats.poisson.pmf(k, mean)) for k in range(tail)]
    pmf.append(float(stats.poisson.sf(tail - 1, mean)))
    return chisquare_gof(name, hist.tolist(), pmf)


def categorical(name: str, symbols: Sequence[Hashable], alphabet: Sequence[Hashable],
                probs: Sequence) -> StatResult:
    index = {s: i for i, s in enumerate(alphabet)}
    observed = [0] * len(alphabet)
    for s in symbols:
        observed[index[s]] += 1
    return chisquare_gof(name, observed, [float(p) for p in probs])


def contingency(name: str, pairs: Sequence[tuple[Hashable, Hashable]]) -> StatResult:
    """Chi-square test of independence on the table of observed pairs."""
    if len(pairs) < 20:
        raise InsufficientSample(f"{name}: only {len(pairs)} pairs")
    rows = sorted({a for a, _ in pairs}, key=str)
    cols = sorted({b for _, b in pairs}, key=str)
    if len(rows) < 2 or len(cols) < 2:
        raise InsufficientSample(f"{name}: table is degenerate ({len(rows)}x{len(cols)})")
    ri = {r: i for i, r in enumerate(rows)}
    ci = {c: i for i, c in enumerate(cols)}
    table = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for a, b in pairs:
        table[ri[a], ci[b]] += 1
    res = stats.chi2_contingency(table, correction=False)
    return StatResult(name, float(res.statistic), float(res.pvalue), len(pairs), int(res.dof))


def ks_distance_uniform(values: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    """Exact two-sided KS distance of ``values`` from the uniform law on ``[lo, hi]``."""
    xs = sorted((v - lo) / (hi - lo) for v in values)
    n = len(xs)
    d = Fraction(0)
    for i, u in enumerate(xs):
        d = max(d, Fraction(i + 1, n) - u, u - Fraction(i, n))
    return d


def ks_uniform(name: str, values: Sequence[Fraction], lo, hi) -> StatResult:
    n = len(values)
    if n < 20:
        raise InsufficientSample(f"{name}: only {n} values")
    d = ks_distance_uniform(values, Fraction(lo), Fraction(hi))
    return StatResult(name, float(d), float(stats.kstwo.sf(float(d), n)), n)


def ks_exponential(name: str, values, rate: float) -> StatResult:
    xs = np.asarray(values, dtype=float)
    if xs.size < 20:
        raise InsufficientSample(f"{name}: only {xs.size} values")
    res = stats.kstest(xs, "expon", args=(0.0, 1.0 / rate))
    return StatResult(name, float(res.statistic), float(res.pvalue), int(xs.size))
