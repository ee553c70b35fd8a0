"""Continuous-time Markov trajectories from marked points.

With a uniform holding rate the jump times of a stationary chain form a
Poisson process independent of the skeleton (the sequence of visited
states). So a marked Poisson configuration together with a map from mark
sequences to state sequences is all that is needed to build a path: the
state at time ``t`` is the state attached to the last jump at or before
``t``.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Protocol, Sequence

import networkx as nx
from mpmath import iv

from .borel import MarkDistribution
from .errors import EncoderCoreTooSmall, InvisibleJump
from .pointproc import (MarkedConfiguration, PointConfiguration, Window, as_rational,
                        derive_seed, sample_poisson, translate)

ENTROPY_WIDTH = Fraction(1, 2 ** 40)


def _solve_stationary(matrix: tuple[tuple[Fraction, ...], ...]) -> tuple[Fraction, ...]:
    """Unique ``b`` with ``b M = b`` and ``sum(b) = 1`` by exact elimination."""
    n = len(matrix)
    # rows: (M^T - I) b = 0 for the first n-1 equations, then sum(b) = 1
    rows = [[matrix[j][i] - (1 if i == j else 0) for j in range(n)] + [Fraction(0)]
            for i in range(n - 1)]
    rows.append([Fraction(1)] * n + [Fraction(1)])
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise ValueError("stationary distribution is not unique")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return tuple(rows[i][n] for i in range(n))


@dataclass(frozen=True)
class MarkovSpec:
    """Jump chain ``matrix`` with zero diagonal and one holding rate for every state."""

    states: tuple
    matrix: tuple
    holding_rate: Fraction

    def __post_init__(self):
        states = tuple(self.states)
        rows = tuple(tuple(as_rational(x) for x in row) for row in self.matrix)
        rate = as_rational(self.holding_rate)
        n = len(states)
        if n < 2:
            raise ValueError("a jump chain needs at least two states")
        if len(set(states)) != n:
            raise ValueError("states must be distinct")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("transition matrix must be square and match the states")
        for i, r in enumerate(rows):
            if r[i] != 0:
                raise ValueError(f"self-transition at state {states[i]!r}")
            if any(x < 0 for x in r) or sum(r) != 1:
                raise ValueError(f"row {states[i]!r} is not a probability vector")
        if rate <= 0:
            raise ValueError("holding rate must be positive")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "holding_rate", rate)

    @property
    def stationary(self) -> tuple[Fraction, ...]:
        return _solve_stationary(self.matrix)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.states)))
        g.add_edges_from((i, j) for i, r in enumerate(self.matrix)
                         for j, x in enumerate(r) if x > 0)
        return g


@dataclass(frozen=True)
class Trajectory:
    """Right-continuous path: ``states[i]`` holds on ``[jump_i, jump_{i+1})``.

    ``initial_state`` is the state on ``[window.lo, first jump)``. It is
    ``None`` when it cannot be known from the data, which is the usual case:
    it belongs to a jump left of the window. ``None`` inside ``states``
    likewise marks a state the encoder could not certify.
    """

    jumps: PointConfiguration
    states: tuple
    initial_state: Any = None

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) != len(self.jumps):
            raise ValueError("one state per jump is required")

    @property
    def window(self) -> Window:
        return self.jumps.window

    def value_at(self, t) -> Any:
        t = as_rational(t)
        if t not in self.window:
            raise ValueError(f"{t} is outside {self.window}")
        k = bisect_right(self.jumps.points, t) - 1
        return self.initial_state if k < 0 else self.states[k]

    def skeleton(self) -> tuple:
        """States at the jump times."""
        return tuple(self.value_at(q) for q in self.jumps.points)

    def shifted(self, t) -> "Trajectory":
        return Trajectory(translate(self.jumps, t), self.states, self.initial_state)

    def segments(self) -> list[tuple[Fraction, Fraction, Any]]:
        pts = self.jumps.points
        edges = [self.window.lo, *pts, self.window.hi]
        values = [self.initial_state, *self.states]
        return [(a, b, v) for a, b, v in zip(edges, edges[1:], values) if a < b]


class SkeletonEncoder(Protocol):
    alphabet_in: tuple
    alphabet_out: tuple
    radius: int

    def encode(self, marks: Sequence) -> list: ...

    def decode(self, states: Sequence) -> list: ...


@dataclass(frozen=True)
class IdentityEncoder:
    alphabet_in: tuple
    radius: int = 0

    @property
    def alphabet_out(self) -> tuple:
        return self.alphabet_in

    def encode(self, marks: Sequence) -> list:
        return list(marks)

    def decode(self, states: Sequence) -> list:
        return list(states)


def _slide(seq: Sequence, radius: int, table: dict) -> list:
    out = [None] * len(seq)
    for i in range(radius, len(seq) - radius):
        ctx = tuple(seq[i - radius:i + radius + 1])
        if None not in ctx:
            out[i] = table.get(ctx)
            if out[i] is None:
                raise KeyError(f"context {ctx} missing from the block code")
    return out


@dataclass(frozen=True)
class SlidingBlockEncoder:
    """Block code of radius ``radius`` with an inverse block code of radius ``inverse_radius``.

    ``table`` maps each length ``2 * radius + 1`` context of marks to a state;
    ``inverse_table`` maps each length ``2 * inverse_radius + 1`` context of
    states back to the centre mark. Positions too close to an edge or to an
    unknown symbol come out as ``None``.
    """

    alphabet_in: tuple
    alphabet_out: tuple
    radius: int
    table: dict
    inverse_radius: int
    inverse_table: dict

    def encode(self, marks: Sequence) -> list:
        return _slide(marks, self.radius, self.table)

    def decode(self, states: Sequence) -> list:
        return _slide(states, self.inverse_radius, self.inverse_table)

    def check_roundtrip(self, samples: Sequence[Sequence]) -> bool:
        """``decode(encode(m)) == m`` wherever both sides are determined."""
        for m in samples:
            back = self.decode(self.encode(m))
            if any(b is not None and b != a for a, b in zip(m, back)):
                return False
        return True


def assemble_trajectory(marked: MarkedConfiguration, encoder: SkeletonEncoder) -> Trajectory:
    """The path whose jumps are the points and whose states encode the marks."""
    for m in marked.marks:
        if m is not None and m not in encoder.alphabet_in:
            raise ValueError(f"mark {m!r} is not in the encoder's input alphabet")
    states = encoder.encode(marked.marks)
    if len(marked) and all(s is None for s in states):
        raise EncoderCoreTooSmall("the encoder determined no state in this window")
    return Trajectory(marked.base, tuple(states), None)


def disassemble(traj: Trajectory, encoder: SkeletonEncoder) -> MarkedConfiguration:
    """Read jumps and states off a path and decode the marks."""
    seq = [traj.initial_state, *traj.states]
    for i, (a, b) in enumerate(zip(seq, seq[1:])):
        if a is not None and a == b:
            where = traj.jumps.position(i)
            raise InvisibleJump(f"state {a!r} on both sides of the jump at {where}")
    return MarkedConfiguration(traj.jumps, tuple(encoder.decode(traj.states)))


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "checks": {k: {"passed": v.passed, "detail": v.detail}
                           for k, v in self.checks.items()}}


def _iv_rational(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def _entropy_interval(weights: Sequence[tuple[Fraction, Fraction]]):
    """Enclosure of ``-sum(w * log p)`` over pairs ``(w, p)`` with ``p > 0``."""
    total = iv.mpf(0)
    for w, p in weights:
        total -= _iv_rational(w) * iv.log(_iv_rational(p))
    return total


def entropy_intervals(spec: MarkovSpec, dist: MarkDistribution):
    """Certified enclosures of the mark entropy and the skeleton entropy rate."""
    beta = spec.stationary
    mark_terms = [(p, p) for p in dist.probs]
    chain_terms = [(beta[i] * m, m) for i, row in enumerate(spec.matrix) for m in row if m > 0]
    saved, prec = iv.prec, 80
    limit = iv.mpf(ENTROPY_WIDTH.numerator) / ENTROPY_WIDTH.denominator
    try:
        while True:
            iv.prec = prec
            a, b = _entropy_interval(mark_terms), _entropy_interval(chain_terms)
            if a.delta.b <= limit and b.delta.b <= limit:
                return a, b
            prec *= 2
    finally:
        iv.prec = saved


def validate_target(spec: MarkovSpec, dist: MarkDistribution, rate) -> ValidationReport:
    """Check that ``spec`` is a legitimate target for marked Poisson points of ``rate``."""
    rate = as_rational(rate)
    checks = {}
    checks["rate"] = CheckResult(rate == spec.holding_rate,
                                 f"intensity {rate} vs holding rate {spec.holding_rate}")
    g = spec.graph()
    irreducible = nx.is_strongly_connected(g)
    checks["irreducible"] = CheckResult(irreducible, "jump graph strongly connected"
                                        if irreducible else "jump graph not strongly connected")
    aperiodic = irreducible and nx.is_aperiodic(g)
    checks["aperiodic"] = CheckResult(aperiodic, "cycle lengths have gcd 1" if aperiodic
                                      else "chain is periodic or reducible")
    try:
        a, b = entropy_intervals(spec, dist)
    except ValueError as exc:
        checks["entropy"] = CheckResult(False, str(exc))
    else:
        overlap = a.b >= b.a and b.b >= a.a
        checks["entropy"] = CheckResult(
            bool(overlap), f"mark entropy in {a}, skeleton entropy in {b}")
    return ValidationReport(checks)


def _pick(u_num: int, bits: int, probs: Sequence[Fraction]) -> int:
    """Index selected by the dyadic uniform ``u_num / 2**bits`` via inversion."""
    acc = Fraction(0)
    for i, p in enumerate(probs):
        acc += p
        if u_num < acc * (1 << bits):
            return i
    return len(probs) - 1


def sample_ctmc(spec: MarkovSpec, window: Window, seed: int, precision: int = 64) -> Trajectory:
    """Stationary path: Poisson jump times and an independent jump chain started from the stationary law."""
    jumps = sample_poisson(spec.holding_rate, window, derive_seed(seed, "jumps"), precision)
    rng = random.Random(derive_seed(seed, "skeleton"))
    state = _pick(rng.getrandbits(64), 64, spec.stationary)
    initial = spec.states[state]
    states = []
    for _ in range(len(jumps)):
        state = _pick(rng.getrandbits(64), 64, spec.matrix[state])
        states.append(spec.states[state])
    return Trajectory(jumps, tuple(states), initial)


def stationary_occupancy(traj: Trajectory) -> dict:
    """Time spent in each known state."""
    out: dict = {}
    for a, b, v in traj.segments():
        if v is not None:
            out[v] = out.get(v, Fraction(0)) + (b - a)
    return out

