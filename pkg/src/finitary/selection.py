"""A translation-equivariant selection rule that picks disjoint length-2 globes.

The rule reads the configuration strictly from left to right.

* A point ``w`` is a *candidate* when every point in ``(w - clearance, w)``
  sits inside the globe ``[y + 1, y + 3]`` of an earlier candidate ``y``.
  In particular a point preceded by an empty stretch of length ``clearance``
  is a candidate.
* A candidate ``x`` is a *trigger* when no other candidate lies in
  ``(x - lookback, x)``. Each trigger owns the globe ``[x + 1, x + 3]``.

Because ``clearance > 3`` a point inside a candidate's globe always has that
candidate in its clearance interval, and a candidate is never covered by
another candidate's globe. So points inside a globe are never candidates, and
moving them around does not change which points are candidates. This gives
resampling invariance. Triggers are at least ``lookback`` apart, so distinct
globes are at least ``lookback - 2`` apart.

On a finite window the status of a point near the left edge can depend on
points we cannot see. The scan therefore tracks three values per point:
``True``, ``False`` or undetermined, and only reports globes to the right of
the last undetermined point. Optionally it also tracks, for every determined
point, the leftmost coordinate its status depends on; this is what
:func:`locality_radius` reports.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InsufficientCore, NoGroundingGap
from .pointproc import PointConfiguration, Window, as_rational, ceil_fraction

GLOBE_OFFSET = Fraction(1)
GLOBE_LENGTH = Fraction(2)

_UNKNOWN = -1


@dataclass(frozen=True)
class SelectionParams:
    lookback: Fraction = Fraction(130)
    clearance: Fraction = Fraction(5)

    def __post_init__(self):
        object.__setattr__(self, "lookback", as_rational(self.lookback))
        object.__setattr__(self, "clearance", as_rational(self.clearance))
        if self.lookback < 60:
            raise ValueError("lookback must be at least 60")
        reach = GLOBE_OFFSET + GLOBE_LENGTH
        if not reach < self.clearance <= self.lookback:
            raise ValueError(f"clearance must lie in ({reach}, lookback]")

    @property
    def min_gap(self) -> Fraction:
        """Guaranteed distance between endpoints of distinct globes."""
        return self.lookback - GLOBE_LENGTH


@dataclass(frozen=True)
class Globe:
    trigger: Fraction
    special_point: Optional[Fraction]
    count: int

    @property
    def lo(self) -> Fraction:
        return self.trigger + GLOBE_OFFSET

    @property
    def hi(self) -> Fraction:
        return self.trigger + GLOBE_OFFSET + GLOBE_LENGTH

    @property
    def center(self) -> Fraction:
        return self.trigger + GLOBE_OFFSET + GLOBE_LENGTH / 2

    @property
    def special(self) -> bool:
        return self.count == 1

    def contains(self, x) -> bool:
        return self.lo <= as_rational(x) <= self.hi

    def shifted(self, t) -> "Globe":
        t = as_rational(t)
        sp = None if self.special_point is None else self.special_point + t
        return Globe(self.trigger + t, sp, self.count)


@dataclass(frozen=True)
class GlobeSet:
    """Globes certified on ``certified``; every globe meeting it is listed and complete."""

    globes: tuple[Globe, ...]
    certified: Window
    params: SelectionParams = field(default_factory=SelectionParams)

    @property
    def determinacy_margin(self) -> Fraction:
        return self.certified.lo

    def shifted(self, t) -> "GlobeSet":
        return GlobeSet(tuple(g.shifted(t) for g in self.globes),
                        self.certified.shifted(t), self.params)

    def __len__(self):
        return len(self.globes)


@dataclass(frozen=True)
class SpecialGlobes:
    """Special globes indexed so that index 0 has the largest non-positive right end.

    When no special globe ends at or left of the origin, ``anchored`` is
    False and the first listed globe gets index 1.
    """

    entries: tuple[tuple[int, Globe], ...]
    anchored: bool

    def __len__(self):
        return len(self.entries)

    def by_index(self) -> dict[int, Globe]:
        return dict(self.entries)


@dataclass
class _Scan:
    xs: list            # positions scaled by ``scale``
    scale: int
    lo: int             # window ends, scaled
    hi: int
    cand: list
    trig: list
    cdep: Optional[list]
    tdep: Optional[list]
    last_unknown: Optional[int]
    triggers: list      # indices of triggers with status True


def _scan(config: PointConfiguration, params: SelectionParams, track_deps: bool = False) -> _Scan:
    w_ = config.window
    L_, A_ = params.lookback, params.clearance
    S = math.lcm(config.den, L_.denominator, A_.denominator,
                 w_.lo.denominator, w_.hi.denominator)
    f = S // config.den
    xs = list(config.nums) if f == 1 else [n * f for n in config.nums]
    lo = w_.lo.numerator * (S // w_.lo.denominator)
    hi = w_.hi.numerator * (S // w_.hi.denominator)
    L = L_.numerator * (S // L_.denominator)
    A = A_.numerator * (S // A_.denominator)
    one, three = S, 3 * S

    n = len(xs)
    cand = [0] * n
    trig = [0] * n
    cdep = [None] * n if track_deps else None
    tdep = [None] * n if track_deps else None
    true_c = []          # indices of candidates with status True
    unk_c = []           # positions of candidates with unknown status
    triggers = []
    last_unknown = None
    pi = 0               # first index with xs[pi] > w - A

    for j in range(n):
        w = xs[j]
        wa = w - A
        while xs[pi] <= wa:
            pi += 1
        tc = true_c[-1] if true_c else -1
        tcx = xs[tc] if tc >= 0 else None
        # candidate status of w
        dep = None
        if tcx is not None and tcx > wa:
            c = 0                                  # a candidate in the clearance interval
            if track_deps:
                dep = cdep[tc]
        elif wa < lo:
            c = _UNKNOWN
        elif pi == j:
            c = 1                                  # empty clearance interval
            dep = wa
        else:
            ylo = xs[j - 1] - three
            yhi = xs[pi] - one
            if wa < yhi:
                yhi = wa
            if ylo > yhi:
                c = 0                              # no single globe can cover P
                dep = wa
            else:
                tc_in_y = tcx is not None and ylo <= tcx <= yhi
                unk_in_y = bool(unk_c) and unk_c[-1] >= ylo and (
                    unk_c[bisect_left(unk_c, ylo)] <= yhi)
                if not tc_in_y and not unk_in_y and ylo >= lo:
                    c = 0                          # no candidate can cover P
                    if track_deps:
                        a, b = bisect_left(xs, ylo), bisect_right(xs, yhi)
                        dep = min([ylo, wa] + [cdep[k] for k in range(a, b)])
                elif unk_c and unk_c[-1] > wa:
                    c = _UNKNOWN
                elif tc_in_y:
                    c = 1
                    if track_deps:
                        dep = min(wa, cdep[tc])
                else:
                    c = _UNKNOWN
        cand[j] = c
        if track_deps:
            cdep[j] = dep
        # trigger status of w
        if c == 0:
            t = 0
            tdp = dep
        elif tcx is not None and tcx > w - L:
            t = 0
            tdp = cdep[tc] if track_deps else None
        elif c == _UNKNOWN or w - L < lo or (unk_c and unk_c[-1] > w - L):
            t = _UNKNOWN
            tdp = None
        else:
            t = 1
            tdp = None
            if track_deps:
                a = bisect_right(xs, w - L)
                tdp = min([w - L, dep] + [cdep[k] for k in range(a, j)])
        trig[j] = t
        if track_deps:
            tdep[j] = tdp
        if c == 1:
            true_c.append(j)
        elif c == _UNKNOWN:
            unk_c.append(w)
        if t == 1:
            triggers.append(j)
        if c == _UNKNOWN or t == _UNKNOWN:
            last_unknown = j

    return _Scan(xs, S, lo, hi, cand, trig, cdep, tdep, last_unknown, triggers)


def _certified(scan: _Scan) -> tuple[int, int]:
    base = scan.lo if scan.last_unknown is None else scan.xs[scan.last_unknown]
    return base + 3 * scan.scale, scan.hi - 2 * scan.scale


def _build(scan: _Scan, params: SelectionParams) -> GlobeSet:
    S, xs = scan.scale, scan.xs
    clo, chi = _certified(scan)
    if clo >= chi:
        raise NoGroundingGap("no certified region; enlarge the window on the left")
    globes = []
    for j in scan.triggers:
        x = xs[j]
        if scan.last_unknown is not None and j <= scan.last_unknown:
            continue
        if x + 3 * S >= scan.hi:
            break
        a, b = bisect_left(xs, x + S), bisect_right(xs, x + 3 * S)
        sp = Fraction(xs[a], S) if b - a == 1 else None
        globes.append(Globe(Fraction(x, S), sp, b - a))
    return GlobeSet(tuple(globes), Window(Fraction(clo, S), Fraction(chi, S)), params)


def find_globes(config: PointConfiguration,
                params: SelectionParams = SelectionParams()) -> GlobeSet:
    """Globes of ``config`` on the part of the window where they are certain."""
    return _build(_scan(config, params), params)


def special_globes(gs: GlobeSet, config: PointConfiguration | None = None) -> SpecialGlobes:
    """Special globes with the origin-anchored index convention."""
    sp = [g for g in gs.globes if g.special]
    k0 = None
    for k, g in enumerate(sp):
        if g.hi <= 0:
            k0 = k
    if k0 is None:
        return SpecialGlobes(tuple((k + 1, g) for k, g in enumerate(sp)), False)
    return SpecialGlobes(tuple((k - k0, g) for k, g in enumerate(sp)), True)


def locality_radius(config: PointConfiguration, query: Window,
                    params: SelectionParams = SelectionParams()) -> Fraction:
    """Radius ``R`` such that agreement on ``[query.lo - R, query.hi]`` fixes the globes meeting ``query``.

    The comparison configuration must live on the same window. Besides the
    points whose globes can meet ``query``, every point within
    ``lookback + clearance + 3`` left of ``query.hi`` must be determined, so
    that no new undetermined point can appear to the right under
    perturbation.
    """
    return _locality(_scan(config, params, track_deps=True), query, params)


def _locality(scan: _Scan, query: Window, params: SelectionParams) -> Fraction:
    S, xs = scan.scale, scan.xs
    qlo, qhi = query.lo * S, query.hi * S
    start = min(qlo - 3 * S, qhi - (params.lookback + params.clearance + 3) * S)
    clo, chi = _certified(scan)
    if not (clo <= qlo and qhi <= chi) or start < scan.lo:
        raise NoGroundingGap(f"query {query} is not inside the certified region")
    a = bisect_left(xs, ceil_fraction(start))
    b = bisect_right(xs, math.floor(qhi))
    deepest = start
    for k in range(a, b):
        if scan.cand[k] == _UNKNOWN or scan.trig[k] == _UNKNOWN:
            raise NoGroundingGap(f"undetermined point near {query}")
        deepest = min(deepest, scan.cdep[k], scan.tdep[k])
    return (qlo - deepest) / S


def globe_intervals(gs: GlobeSet) -> list[tuple[Fraction, Fraction]]:
    return [(g.lo, g.hi) for g in gs.globes]


def require_special_core(sg: SpecialGlobes, minimum: int = 2) -> None:
    if len(sg) < minimum:
        raise InsufficientCore(f"{len(sg)} certified special globes, need {minimum}")
