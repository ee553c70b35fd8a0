"""The marking map: resample special points and hand out i.i.d. marks, exactly.

Between two consecutive special cells sit ``n - 1`` ordinary points; together
with the special point of the right-hand cell that makes ``n`` points to mark.
The special point's offset inside its cell is a uniform value ``v``. Peeling
``n`` digits off ``v`` gives the ``n`` marks and a fresh uniform remainder
``g``, which becomes the new offset of the special point. The ordinary point
closest to the right-hand cell gets the first digit, the next one the second
digit, and so on; the special point gets the last digit.

Two partitions are supported. ``"globes"`` uses the special globes of the
selection rule and is translation-equivariant for every real shift.
``"unit"`` uses the unit intervals ``[k, k + 1)`` (a cell is special when it
holds exactly one point) and is equivariant under integer shifts only.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional, Sequence

from .borel import MarkDistribution
from .errors import InsufficientCore, StructureError
from .pointproc import (MarkedConfiguration, PointConfiguration, Window,
                        as_rational, ceil_fraction)
from .selection import GlobeSet, SelectionParams, _locality, _build, _scan, find_globes

Partition = Literal["globes", "unit"]


@dataclass(frozen=True)
class Cell:
    """A special cell ``[lo, lo + length]`` holding exactly the point at ``index``."""

    lo: Fraction
    length: Fraction
    index: int

    @property
    def hi(self) -> Fraction:
        return self.lo + self.length

    @property
    def center(self) -> Fraction:
        return self.lo + self.length / 2


@dataclass(frozen=True)
class CellRecord:
    """Audit record for one resampled special point."""

    center: Fraction
    special_point: Fraction
    new_point: Fraction
    n: int
    v: Fraction
    g: Fraction
    marks: tuple
    bits_available: int
    bits_needed: float


@dataclass(frozen=True)
class PsiResult:
    output: MarkedConfiguration
    core_region: Window
    witness: tuple[CellRecord, ...]
    core_indices: tuple[int, int]
    partition: str = "globes"

    def rank_table(self) -> list[tuple[int, list[Fraction]]]:
        """Per cell: ``n`` and the ordinary points by rank (rank 1 first)."""
        pts = self.output.base
        a, _ = self.core_indices
        table, start = [], a
        for rec in self.witness:
            stop = start + rec.n - 1
            table.append((rec.n, [pts.position(k) for k in range(stop - 1, start - 1, -1)]))
            start = stop + 1
        return table


def _globe_cells(config: PointConfiguration, gs: GlobeSet) -> list[Cell]:
    cells = []
    for g in gs.globes:
        if g.special:
            i, j = config.index_range(g.lo, g.hi, hi_closed=True)
            if j - i != 1:
                raise StructureError(f"globe [{g.lo}, {g.hi}] holds {j - i} points, expected 1")
            cells.append(Cell(g.lo, g.hi - g.lo, i))
    return cells


def _unit_cells(config: PointConfiguration) -> list[Cell]:
    w = config.window
    first, last = ceil_fraction(w.lo), math.floor(w.hi) - 1
    den, nums = config.den, config.nums
    cells, j, n = [], 0, len(nums)
    while j < n:
        k = nums[j] // den
        stop = j + 1
        while stop < n and nums[stop] // den == k:
            stop += 1
        if stop - j == 1 and first <= k <= last:
            cells.append(Cell(Fraction(k), Fraction(1), j))
        j = stop
    return cells


def special_cells(config: PointConfiguration, params: SelectionParams = SelectionParams(),
                  partition: Partition = "globes", globes: Optional[GlobeSet] = None) -> list[Cell]:
    if partition == "globes":
        return _globe_cells(config, globes if globes is not None else find_globes(config, params))
    if partition == "unit":
        return _unit_cells(config)
    raise ValueError(f"unknown partition {partition!r}")


def _rebuild(config: PointConfiguration, replacements: dict[int, Fraction]) -> PointConfiguration:
    den = math.lcm(config.den, *(p.denominator for p in replacements.values()))
    f = den // config.den
    nums = [n * f for n in config.nums] if f != 1 else list(config.nums)
    for k, p in replacements.items():
        nums[k] = p.numerator * (den // p.denominator)
    return PointConfiguration.from_scaled(config.window, nums, den, check=False)


def _bits_needed(dist: MarkDistribution, idxs: Sequence[int]) -> float:
    counts = Counter(idxs)
    return sum(c * -math.log2(dist.probs[i]) for i, c in counts.items())


def psi_forward(config: PointConfiguration, dist: MarkDistribution,
                params: SelectionParams = SelectionParams(), *,
                partition: Partition = "globes", globes: Optional[GlobeSet] = None) -> PsiResult:
    """Mark every point between the first and last special cell.

    ``globes`` may be passed to reuse a globe set computed from a
    configuration that differs from ``config`` only inside special globes;
    the selection rule gives the same globes for both.
    """
    return mark_cells(config, dist, special_cells(config, params, partition, globes), partition)


def mark_cells(config: PointConfiguration, dist: MarkDistribution, cells: Sequence[Cell],
               partition: str = "globes") -> PsiResult:
    """The marking step on explicitly given special cells.

    The output between two consecutive cells depends only on the points from
    one special point to the next, so a long configuration can be marked
    piece by piece: each piece then carries only the precision of its own
    special point.
    """
    if len(cells) < 2:
        raise InsufficientCore(f"{len(cells)} special cells in {config.window}, need 2")
    nums, den = config.nums, config.den
    marks: list = [None] * len(nums)
    moved: dict[int, Fraction] = {}
    witness = []
    for prev, cur in zip(cells, cells[1:]):
        n = cur.index - prev.index
        s = Fraction(nums[cur.index], den)
        v = (s - cur.lo) / cur.length
        if v >= 1:
            raise StructureError(f"special point {s} sits on the closed right end of its cell")
        rn, rd, idxs = dist.extract_indices(v.numerator, v.denominator, n)
        g = Fraction(rn, rd)
        new = cur.lo + cur.length * g
        for k in range(1, n):
            marks[cur.index - k] = dist.alphabet[idxs[k - 1]]
        marks[cur.index] = dist.alphabet[idxs[n - 1]]
        moved[cur.index] = new
        witness.append(CellRecord(cur.center, s, new, n, v, g,
                                  tuple(dist.alphabet[i] for i in idxs),
                                  v.denominator.bit_length() - 1, _bits_needed(dist, idxs)))
    out = MarkedConfiguration(_rebuild(config, moved), tuple(marks))
    core = Window(cells[0].hi, cells[-1].hi)
    return PsiResult(out, core, tuple(witness), (cells[0].index + 1, cells[-1].index + 1),
                     partition)


def psi_inverse(marked: MarkedConfiguration, dist: MarkDistribution,
                params: SelectionParams = SelectionParams(), *,
                partition: Partition = "globes", globes: Optional[GlobeSet] = None
                ) -> PointConfiguration:
    """Undo :func:`psi_forward`: rebuild each special point from its cell's marks."""
    base = marked.base
    cells = special_cells(base, params, partition, globes)
    if len(cells) < 2:
        raise InsufficientCore(f"{len(cells)} special cells in {base.window}, need 2")
    nums, den, marks = base.nums, base.den, marked.marks
    moved: dict[int, Fraction] = {}
    for prev, cur in zip(cells, cells[1:]):
        n = cur.index - prev.index
        seq = [marks[cur.index - k] for k in range(1, n)] + [marks[cur.index]]
        if any(m is None for m in seq):
            raise StructureError(f"unmarked point in the cell ending at {cur.hi}")
        idxs = [dist.index_of(m) for m in seq]
        g = (Fraction(nums[cur.index], den) - cur.lo) / cur.length
        if g >= 1:
            raise StructureError(f"special point sits on the closed right end of {cur.hi}")
        vn, vd = dist.inject_indices(g.numerator, g.denominator, idxs)
        moved[cur.index] = cur.lo + cur.length * Fraction(vn, vd)
    return _rebuild(base, moved)


def marks_on(result: PsiResult, lo, hi) -> list[tuple[Fraction, object]]:
    """Output points with their marks in the open interval ``(lo, hi)``."""
    return result.output.between(lo, hi)


def coding_window(config: PointConfiguration, params: SelectionParams = SelectionParams(),
                  center=0) -> Fraction:
    """Integer ``w`` such that the input on ``(center - w, center + w)`` fixes the output on ``(center - 1, center + 1)``.

    Agreement is meant between configurations on the same window. The
    output near ``center`` lives in the cells whose right-hand special globe
    ends after ``center - 1``, up to the first one ending at or after
    ``center + 1``. Those globes, the special globe before them, and
    everything the selection rule needs to certify them must be visible.
    """
    center = as_rational(center)
    scan = _scan(config, params, track_deps=True)
    gs = _build(scan, params)
    sp = [g for g in gs.globes if g.special]
    i_min = next((k for k, g in enumerate(sp) if g.hi > center - 1), None)
    i_max = next((k for k, g in enumerate(sp) if g.hi >= center + 1), None)
    if i_min is None or i_max is None or i_min == 0:
        raise InsufficientCore(f"no certified special globes on both sides of {center}")
    region = Window(sp[i_min - 1].lo, sp[i_max].hi)
    radius = _locality(scan, region, params)
    left = region.lo - radius
    return Fraction(math.floor(max(center - left, region.hi - center)) + 1)


def core_contains(result: PsiResult, lo, hi) -> bool:
    lo, hi = as_rational(lo), as_rational(hi)
    return result.core_region.lo <= lo and hi <= result.core_region.hi

