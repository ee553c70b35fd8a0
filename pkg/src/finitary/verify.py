"""Exact and statistical checks of the whole pipeline, with reproducible reports.

Exact checks run on fixed-window samples and compare rationals for equality.
Statistical checks need unbiased data, so they fix a target interval first
and grow the sample (block by block, with independent blocks) until the
marking core covers the target. The output on the target is then the output
of the whole-line map, and only data inside the target is used.
"""

from __future__ import annotations

import json
import math
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np

from .borel import MarkDistribution
from .errors import FinitaryError, InsufficientSample, Undetermined
from .flow import IdentityEncoder, assemble_trajectory
from .marking import Cell, coding_window, mark_cells, psi_forward, psi_inverse, special_cells
from .pointproc import (MarkedConfiguration, PointConfiguration, Window, as_rational,
                        derive_seed, refine_points, restrict, sample_blocks, sample_poisson,
                        translate, translate_marked)
from .selection import GlobeSet, SelectionParams, find_globes
from . import stats

BLOCK = 512
CORRUPTIONS = (None, "mark_flip", "skip_resampling")
EXACT_TESTS = ("roundtrip", "equivariance", "unit_equivariance", "resampling_fresh",
               "resampling_adversarial", "globe_gap", "trigger_outside_globes",
               "coding_window_perturbation")
STAT_TESTS = ("poisson_counts", "mark_frequencies", "mark_pairs", "marks_vs_gaps",
              "marks_vs_special_offset", "offsets_uniform", "offsets_vs_outside",
              "jump_gaps", "gaps_vs_states")
# gap buckets with equal Exp(1) mass: log(4/3), log(2), log(4)
_GAP_EDGES = (math.log(4 / 3), math.log(2), math.log(4))


@dataclass
class TrialPlan:
    seeds: list
    window_length: Fraction = Fraction(2000)
    rate: Fraction = Fraction(1)
    dist: MarkDistribution = field(
        default_factory=lambda: MarkDistribution.from_probs([Fraction(1, 2), Fraction(1, 2)]))
    params: SelectionParams = field(default_factory=SelectionParams)
    tests: tuple = ()
    significance: float = 1e-3
    precision: int = 64
    corruption: Optional[str] = None
    target_length: int = 20000
    offset_window: int = 1 << 20
    perturbations: int = 1
    max_gap_samples: int = 200_000

    def __post_init__(self):
        self.seeds = list(self.seeds)
        self.window_length = as_rational(self.window_length)
        self.rate = as_rational(self.rate)
        self.tests = tuple(self.tests)
        if not self.seeds:
            raise ValueError("a plan needs at least one seed")
        if not 0 < self.significance <= 0.1:
            raise ValueError("significance must lie in (0, 0.1]")
        if self.corruption not in CORRUPTIONS:
            raise ValueError(f"unknown corruption {self.corruption!r}")
        unknown = set(self.tests) - set(EXACT_TESTS) - set(STAT_TESTS)
        if unknown:
            raise ValueError(f"unknown tests {sorted(unknown)}")

    def wants(self, name: str) -> bool:
        return not self.tests or name in self.tests

    @property
    def window(self) -> Window:
        half = self.window_length / 2
        return Window(-half, half)

    def to_dict(self) -> dict:
        return {"seeds": self.seeds, "window_length": str(self.window_length),
                "rate": str(self.rate),
                "distribution": [[s, str(p)] for s, p in zip(self.dist.alphabet, self.dist.probs)],
                "lookback": str(self.params.lookback), "clearance": str(self.params.clearance),
                "tests": list(self.tests), "significance": self.significance,
                "precision": self.precision, "corruption": self.corruption,
                "target_length": self.target_length, "offset_window": self.offset_window,
                "perturbations": self.perturbations, "max_gap_samples": self.max_gap_samples}

    @classmethod
    def from_dict(cls, d: dict) -> "TrialPlan":
        kw: dict[str, Any] = {}
        seeds = d["seeds"]
        if isinstance(seeds, dict):
            seeds = list(range(seeds["start"], seeds["start"] + seeds["count"]))
        kw["seeds"] = seeds
        for key in ("window_length", "rate"):
            if key in d:
                kw[key] = as_rational(d[key])
        if "distribution" in d:
            kw["dist"] = MarkDistribution.from_pairs([(s, as_rational(p)) for s, p in d["distribution"]])
        if "lookback" in d or "clearance" in d:
            kw["params"] = SelectionParams(as_rational(d.get("lookback", 130)),
                                           as_rational(d.get("clearance", 5)))
        for key in ("tests",):
            if key in d:
                kw[key] = tuple(d[key])
        for key in ("significance", "precision", "corruption", "target_length",
                    "offset_window", "perturbations", "max_gap_samples"):
            if key in d:
                kw[key] = d[key]
        return cls(**kw)


@dataclass
class TestResult:
    __test__ = False

    name: str
    kind: str
    passed: bool
    sample_size: int
    statistic: Optional[float] = None
    p_value: Optional[float] = None
    detail: dict = field(default_factory=dict)


@dataclass
class TestReport:
    __test__ = False

    results: list
    seeds: list
    significance: float
    plan: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if all(r.passed for r in self.results) else "fail"

    def get(self, name: str) -> TestResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "significance": self.significance,
                "seeds": self.seeds, "plan": self.plan,
                "results": [asdict(r) for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)

    def merge(self, other: "TestReport") -> "TestReport":
        return TestReport(self.results + other.results, sorted(set(self.seeds) | set(other.seeds)),
                          min(self.significance, other.significance), self.plan)


def _stat_result(res: stats.StatResult, significance: float, **detail) -> TestResult:
    return TestResult(res.name, "statistical", res.p_value >= significance, res.n,
                      res.statistic, res.p_value, {"dof": res.dof, **detail})


def _insufficient(name: str, exc: Exception) -> TestResult:
    return TestResult(name, "statistical", False, 0, detail={"error": str(exc)})


# -- exact suite ---------------------------------------------------------------

def _random_shift(seed: int) -> Fraction:
    rng = random.Random(derive_seed(seed, "shift"))
    return Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 3))


def _replace_in_globes(config: PointConfiguration, gs: GlobeSet,
                       fill: Callable[[int, Any], list]) -> PointConfiguration:
    keep = list(config.points)
    out, gi = [], 0
    globes = gs.globes
    for p in keep:
        while gi < len(globes) and globes[gi].hi < p:
            gi += 1
        if gi < len(globes) and globes[gi].lo <= p:
            continue
        out.append(p)
    for k, g in enumerate(globes):
        out.extend(fill(k, g))
    return PointConfiguration(config.window, out)


def _adversarial_fill(k: int, g) -> list:
    if k % 2 == 0:
        return []
    return [g.lo, g.lo + Fraction(1, 3), g.lo + 1, g.hi - Fraction(1, 7), g.hi]


def _same_selection(a: GlobeSet, b: GlobeSet) -> bool:
    return a.certified == b.certified and [g.trigger for g in a.globes] == [g.trigger for g in b.globes]


def _flip_one_mark(marked: MarkedConfiguration, index: int, dist: MarkDistribution) -> MarkedConfiguration:
    marks = list(marked.marks)
    k = dist.index_of(marks[index])
    marks[index] = dist.alphabet[(k + 1) % len(dist)]
    return MarkedConfiguration(marked.base, tuple(marks))


def _perturb_outside(config: PointConfiguration, w: Fraction, seed: int, variant: int) -> PointConfiguration:
    inside = [p for p in config.points if -w < p < w]
    win = config.window
    extra = []
    if variant % 2 == 0:
        fresh = sample_poisson(1, win, derive_seed(seed, "perturb", variant))
        extra = [p for p in fresh.points if not -w < p < w]
    else:
        # adversarial: a dense comb outside, or nothing at all
        if variant % 4 == 1:
            step = Fraction(7, 3)
            x = win.lo
            while x < win.hi:
                if not -w < x < w:
                    extra.append(x)
                x += step
    return PointConfiguration(win, inside + extra)


class _Tally:
    def __init__(self):
        self.counts: dict[str, list[int]] = {}
        self.notes: dict[str, dict] = {}

    def add(self, name: str, ok: bool):
        c = self.counts.setdefault(name, [0, 0])
        c[0 if ok else 1] += 1

    def note(self, name: str, key: str, value):
        self.notes.setdefault(name, {})[key] = value

    def result(self, name: str, allow_empty: bool = False) -> TestResult:
        good, bad = self.counts.get(name, [0, 0])
        detail = {"passed_cases": good, "failed_cases": bad, **self.notes.get(name, {})}
        ok = bad == 0 and (good > 0 or allow_empty)
        return TestResult(name, "exact", ok, good + bad, detail=detail)


def run_exact_suite(plan: TrialPlan) -> TestReport:
    """Round trip, equivariance, resampling invariance, globe gaps, coding windows."""
    t = _Tally()
    dist, params = plan.dist, plan.params
    undetermined = {"no_globes": 0, "no_core": 0, "no_coding_window": 0}
    min_gap: Optional[Fraction] = None
    ident = IdentityEncoder(dist.alphabet)
    for seed in plan.seeds:
        c = sample_poisson(plan.rate, plan.window, seed, plan.precision)
        try:
            gs = find_globes(c, params)
        except Undetermined:
            undetermined["no_globes"] += 1
            continue
        if plan.wants("globe_gap"):
            for g1, g2 in zip(gs.globes, gs.globes[1:]):
                gap = g2.lo - g1.hi
                min_gap = gap if min_gap is None else min(min_gap, gap)
                t.add("globe_gap", gap >= params.min_gap)
        if plan.wants("trigger_outside_globes"):
            for g in gs.globes:
                t.add("trigger_outside_globes", not any(h.contains(g.trigger) for h in gs.globes))
        if plan.wants("resampling_fresh"):
            fresh = _replace_in_globes(
                c, gs, lambda k, g: list(sample_poisson(plan.rate, Window(g.lo, g.hi),
                                                        derive_seed(seed, "fresh", k)).points))
            t.add("resampling_fresh", _same_selection(find_globes(fresh, params), gs))
        if plan.wants("resampling_adversarial"):
            adv = _replace_in_globes(c, gs, _adversarial_fill)
            t.add("resampling_adversarial", _same_selection(find_globes(adv, params), gs))
        try:
            r = psi_forward(c, dist, params, globes=gs)
        except Undetermined:
            undetermined["no_core"] += 1
            r = None
        if r is not None and plan.wants("roundtrip"):
            out = r.output
            if plan.corruption == "mark_flip":
                out = _flip_one_mark(out, r.core_indices[0], dist)
            ok = psi_inverse(out, dist, params) == c
            moved = {k for k, (a, b) in enumerate(zip(c.nums, out.base.nums))
                     if Fraction(a, c.den) != Fraction(b, out.base.den)}
            ok = ok and len(moved) <= len(r.witness)
            ok = ok and _same_selection(find_globes(out.base, params), gs)
            t.add("roundtrip", ok)
        if plan.wants("equivariance"):
            shift = _random_shift(seed)
            moved_c = translate(c, shift)
            gs_t = find_globes(moved_c, params)
            ok = gs_t == gs.shifted(shift)
            if r is not None:
                r_t = psi_forward(moved_c, dist, params)
                ok = ok and r_t.output == translate_marked(r.output, shift)
                ok = ok and r_t.core_region == r.core_region.shifted(shift)
                traj = assemble_trajectory(r.output, ident)
                ok = ok and assemble_trajectory(r_t.output, ident) == traj.shifted(shift)
            t.add("equivariance", ok)
        if plan.wants("unit_equivariance"):
            k = int(_random_shift(seed)) % 997 + 1
            try:
                ru = psi_forward(c, dist, params, partition="unit")
            except Undetermined:
                pass
            else:
                ru_t = psi_forward(translate(c, k), dist, params, partition="unit")
                ok = ru_t.output == translate_marked(ru.output, k)
                ok = ok and psi_inverse(ru.output, dist, params, partition="unit") == c
                t.add("unit_equivariance", ok)
        if plan.wants("coding_window_perturbation") and r is not None:
            try:
                w = coding_window(c, params)
            except Undetermined:
                undetermined["no_coding_window"] += 1
                continue
            ref = r.output.between(-1, 1)
            for v in range(plan.perturbations):
                pert = _perturb_outside(c, w, seed, v)
                try:
                    got = psi_forward(pert, dist, params).output.between(-1, 1)
                except FinitaryError:
                    got = None
                t.add("coding_window_perturbation", got == ref)
    results = []
    for name in EXACT_TESTS:
        if plan.wants(name):
            if name == "globe_gap":
                t.note(name, "min_gap", None if min_gap is None else str(min_gap))
            results.append(t.result(name))
    results.append(TestResult("undetermined_samples", "info", True, len(plan.seeds),
                              detail=dict(undetermined)))
    return TestReport(results, list(plan.seeds), plan.significance, plan.to_dict())


# -- statistical suite -----------------------------------------------------------

@dataclass
class TargetSample:
    """Marking output on a fixed target interval, with the data the tests need."""

    unit_counts: list
    marks: list
    gaps: np.ndarray
    mark_pairs: list
    special_pairs: list
    holding: list
    units_sampled: int
    cells: int


def grow_until_covered(rate, target: Window, seed: int, params: SelectionParams,
                       block: int = BLOCK) -> tuple[PointConfiguration, GlobeSet]:
    """Add independent blocks on either side until the marking core covers ``target``."""
    left = math.floor(target.lo / block) - 4
    right = math.ceil(target.hi / block) + 4
    cache: dict = {}
    while True:
        c = sample_blocks(rate, left, right, block, seed, cache=cache)
        try:
            gs = find_globes(c, params)
            sp = [g for g in gs.globes if g.special]
        except Undetermined:
            gs, sp = None, []
        ok_left = any(g.hi < target.lo for g in sp)
        ok_right = any(g.hi >= target.hi for g in sp)
        if ok_left and ok_right:
            return c, gs
        grow = max(4, (right - left) // 4)
        if not ok_left:
            left -= grow
        if not ok_right:
            right += grow


def _mark_target(plan: TrialPlan, seed: int, c: PointConfiguration, cells: list[Cell],
                 target: Window) -> tuple[list, list, list, int]:
    """Marked output on ``target``, one cell at a time.

    Each special point gets independent extra low bits, enough for the
    digits its cell consumes; only the cells meeting ``target`` are marked.
    Returns ``(nums_dens, marks, special_pairs, cells_marked)`` where the
    output positions are ``(num, den)`` pairs.
    """
    dist = plan.dist
    worst = max(-math.log2(p) for p in dist.probs)
    spacing = Fraction(BLOCK, 1 << 64)
    positions, marks, special_pairs = [], [], []
    done = 0
    for prev, cur in zip(cells, cells[1:]):
        if cur.hi <= target.lo or prev.hi >= target.hi:
            continue
        n = cur.index - prev.index
        local = PointConfiguration.from_scaled(
            Window(prev.lo, cur.hi + 1), c.nums[prev.index:cur.index + 1], c.den, check=False)
        refined = refine_points(local, {n: math.ceil(n * worst) + 64}, spacing, seed)
        r = mark_cells(refined, dist, [Cell(prev.lo, prev.length, 0), Cell(cur.lo, cur.length, n)])
        base = refined if plan.corruption == "skip_resampling" else r.output.base
        den = base.den
        positions.extend((base.nums[k], den) for k in range(1, n + 1))
        marks.extend(r.output.marks[1:])
        rec = r.witness[0]
        pos = Fraction(base.nums[n], den)
        if target.lo <= pos < target.hi:
            special_pairs.append((rec.marks[0], pos < rec.center))
        done += 1
    if plan.corruption == "mark_flip" and marks:
        k = dist.index_of(marks[0])
        marks[0] = dist.alphabet[(k + 1) % len(dist)]
    return positions, marks, special_pairs, done


def collect_target(plan: TrialPlan, seed: int, target: Optional[Window] = None,
                   with_holding: bool = True) -> TargetSample:
    params = plan.params
    target = target or Window(0, plan.target_length)
    c, gs = grow_until_covered(plan.rate, target, seed, params)
    cells = special_cells(c, params, "globes", gs)
    positions, marks, special_pairs, done = _mark_target(plan, seed, c, cells, target)
    lo_t, hi_t = target.lo, target.hi
    inside = [(i, (n, d)) for i, (n, d) in enumerate(positions)
              if lo_t.numerator * d <= n * lo_t.denominator and n * hi_t.denominator < hi_t.numerator * d]
    i0, i1 = inside[0][0], inside[-1][0] + 1
    pts = [nd for _, nd in inside]
    marks = marks[i0:i1]
    lo_k, hi_k = math.ceil(lo_t), math.floor(hi_t)
    unit_counts = [0] * (hi_k - lo_k)
    for n, d in pts:
        k = n // d
        if lo_k <= k < hi_k:
            unit_counts[k - lo_k] += 1
    floats = np.array([n / d for n, d in pts], dtype=float)
    gaps = np.diff(floats)
    holding = []
    if with_holding:
        base = PointConfiguration(target, [Fraction(n, d) for n, d in pts])
        traj = assemble_trajectory(MarkedConfiguration(base, marks), IdentityEncoder(plan.dist.alphabet))
        holding = [(v, float(b - a)) for a, b, v in traj.segments()[1:-1]]
    return TargetSample(unit_counts, marks, gaps, list(zip(marks, marks[1:])), special_pairs,
                        holding, int(c.window.length), done)


def _gap_bucket(g: float) -> int:
    return sum(g >= e for e in _GAP_EDGES)


def collect_offsets(plan: TrialPlan, seed: int) -> tuple[list, list]:
    """Special-point offsets from their globe centres, with a feature read off outside the globe."""
    c = sample_blocks(plan.rate, 0, plan.offset_window // BLOCK, BLOCK, seed)
    gs = find_globes(c, plan.params)
    offsets, pairs = [], []
    for g in gs.globes:
        if not g.special or g.hi + 4 >= c.window.hi:
            continue
        off = g.special_point - g.center
        offsets.append(off)
        outside = min(c.count_between(g.hi, g.hi + 4, lo_closed=False, hi_closed=True), 6)
        pairs.append((int((off + 1) * 2), max(outside, 2)))
    return offsets, pairs


def _target_job(job: tuple) -> TargetSample:
    plan, seed, with_holding = job
    return collect_target(plan, seed, with_holding=with_holding)


def _offsets_job(job: tuple) -> tuple[list, list]:
    plan, seed = job
    return collect_offsets(plan, seed)


def _fan_out(fn: Callable, jobs: list, workers: int):
    """Results in job order; with ``workers > 1`` the jobs run in separate processes."""
    if workers <= 1 or len(jobs) <= 1:
        return map(fn, jobs)
    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        return list(pool.map(fn, jobs))
    finally:
        pool.shutdown()


def run_statistical_suite(plan: TrialPlan, progress: Optional[Callable[[int], None]] = None,
                          workers: int = 1) -> TestReport:
    """Distributional checks of the globes, the marking output and the assembled paths.

    Seeds are independent trials. Results are merged in seed order, so the
    report does not depend on ``workers``.
    """
    a = plan.significance
    dist = plan.dist
    results = []
    want_target = any(plan.wants(n) for n in STAT_TESTS[:5] + STAT_TESTS[7:])
    counts, marks, mark_pairs, gap_pairs, special_pairs = [], [], [], [], []
    holding_gaps, holding_pairs = [], []
    gaps_kept = 0
    units = cells = 0
    if want_target:
        jobs = [(plan, seed, k * plan.target_length < plan.max_gap_samples)
                for k, seed in enumerate(plan.seeds)]
        for seed, ts in zip(plan.seeds, _fan_out(_target_job, jobs, workers)):
            counts.extend(ts.unit_counts)
            marks.extend(ts.marks)
            mark_pairs.extend(ts.mark_pairs)
            gap_pairs.extend(zip(ts.marks, (_gap_bucket(g) for g in ts.gaps)))
            special_pairs.extend(ts.special_pairs)
            room = plan.max_gap_samples - gaps_kept
            if room > 0:
                chunk = ts.holding[:room]
                holding_gaps.extend(h for _, h in chunk)
                holding_pairs.extend((v, _gap_bucket(h)) for v, h in chunk)
                gaps_kept += len(chunk)
            units += ts.units_sampled
            cells += ts.cells
            if progress:
                progress(seed)
    tests: list[tuple[str, Callable[[], stats.StatResult]]] = [
        ("poisson_counts", lambda: stats.poisson_counts("poisson_counts", counts, float(plan.rate))),
        ("mark_frequencies", lambda: stats.categorical("mark_frequencies", marks, dist.alphabet, dist.probs)),
        ("mark_pairs", lambda: stats.contingency("mark_pairs", mark_pairs)),
        ("marks_vs_gaps", lambda: stats.contingency("marks_vs_gaps", gap_pairs)),
        ("marks_vs_special_offset", lambda: stats.contingency("marks_vs_special_offset", special_pairs)),
        ("jump_gaps", lambda: stats.ks_exponential("jump_gaps", holding_gaps, float(plan.rate))),
        ("gaps_vs_states", lambda: stats.contingency("gaps_vs_states", holding_pairs)),
    ]
    for name, fn in tests:
        if plan.wants(name):
            try:
                results.append(_stat_result(fn(), a))
            except InsufficientSample as exc:
                results.append(_insufficient(name, exc))
    if want_target:
        results.append(TestResult("target_data", "info", True, len(counts),
                                  detail={"units_in_targets": len(counts), "marks": len(marks),
                                          "units_sampled": units, "cells_marked": cells,
                                          "special_points_in_targets": len(special_pairs)}))
    if plan.wants("offsets_uniform") or plan.wants("offsets_vs_outside"):
        offsets, pairs = [], []
        for o, p in _fan_out(_offsets_job, [(plan, seed) for seed in plan.seeds], workers):
            offsets.extend(o)
            pairs.extend(p)
        if plan.wants("offsets_uniform"):
            try:
                results.append(_stat_result(stats.ks_uniform("offsets_uniform", offsets, -1, 1), a))
            except InsufficientSample as exc:
                results.append(_insufficient("offsets_uniform", exc))
        if plan.wants("offsets_vs_outside"):
            try:
                results.append(_stat_result(stats.contingency("offsets_vs_outside", pairs), a))
            except InsufficientSample as exc:
                results.append(_insufficient("offsets_vs_outside", exc))
    return TestReport(results, list(plan.seeds), a, plan.to_dict())


# -- coding windows --------------------------------------------------------------

def _coding_window_grown(plan: TrialPlan, seed: int, limit: int) -> Optional[Fraction]:
    """Coding window on block samples widened until it is certified, or None past ``limit``."""
    half = math.ceil(plan.window_length / 2 / BLOCK)
    cache: dict = {}
    while half * BLOCK <= limit:
        c = sample_blocks(plan.rate, -half, half, BLOCK, seed, cache=cache)
        try:
            w = coding_window(c, plan.params)
        except Undetermined:
            half *= 2
            continue
        if w <= half * BLOCK:
            return w
        half *= 2
    return None


def measure_coding_windows(plan: TrialPlan, adaptive: bool = False,
                           limit: int = 1 << 22) -> TestReport:
    """Distribution of coding windows; passes only if every sample yields a finite window.

    With ``adaptive`` the sample is widened (independent blocks) until the
    window is certified, which measures the window itself rather than the
    chance that a fixed buffer suffices.
    """
    ws: list[Fraction] = []
    failures: dict[str, int] = {}
    for seed in plan.seeds:
        if adaptive:
            w = _coding_window_grown(plan, seed, limit)
            if w is None:
                failures["beyond_limit"] = failures.get("beyond_limit", 0) + 1
            else:
                ws.append(w)
            continue
        c = sample_poisson(plan.rate, plan.window, seed, plan.precision)
        try:
            ws.append(coding_window(c, plan.params))
        except Undetermined as exc:
            key = type(exc).__name__
            failures[key] = failures.get(key, 0) + 1
    n = len(plan.seeds)
    detail: dict[str, Any] = {"finite": len(ws), "undetermined": failures,
                              "finite_fraction": len(ws) / n, "adaptive": adaptive}
    if ws:
        fw = sorted(float(w) for w in ws)
        detail.update(median=statistics.median(fw), max=fw[-1],
                      quantiles={q: float(np.quantile(fw, q)) for q in (0.5, 0.9, 0.99)})
        halves = [sorted(float(w) for w in ws[:len(ws) // 2]), sorted(float(w) for w in ws[len(ws) // 2:])]
        if all(halves):
            m0, m1 = (statistics.median(h) for h in halves)
            detail["median_split_relative_diff"] = abs(m0 - m1) / max(m0, m1)
    name = "coding_windows_adaptive" if adaptive else "coding_windows"
    res = TestResult(name, "exact", len(ws) == n, n, detail=detail)
    return TestReport([res], list(plan.seeds), plan.significance, plan.to_dict())

