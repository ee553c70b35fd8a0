from __future__ import annotations

import math
from fractions import Fraction

import pytest

from finitary.borel import MarkDistribution
from finitary.marking import psi_forward, special_cells
from finitary.pointproc import Window, refine_points
from finitary.verify import (BLOCK, TestReport, TestResult, TrialPlan, collect_target,
                             grow_until_covered, measure_coding_windows, run_exact_suite,
                             run_statistical_suite)

THIRDS = MarkDistribution.from_probs([Fraction(1, 3), Fraction(2, 3)])


def test_plan_validation_and_serialisation():
    with pytest.raises(ValueError):
        TrialPlan(seeds=[])
    with pytest.raises(ValueError):
        TrialPlan(seeds=[1], significance=0.5)
    with pytest.raises(ValueError):
        TrialPlan(seeds=[1], corruption="nonsense")
    with pytest.raises(ValueError):
        TrialPlan(seeds=[1], tests=("no_such_test",))
    plan = TrialPlan(seeds=[1, 2], dist=THIRDS, tests=("roundtrip",), target_length=500)
    again = TrialPlan.from_dict(plan.to_dict())
    assert again.to_dict() == plan.to_dict()
    assert TrialPlan.from_dict({"seeds": {"start": 5, "count": 3}}).seeds == [5, 6, 7]


def test_verdict_requires_every_result():
    ok = TestResult("a", "exact", True, 1)
    bad = TestResult("b", "statistical", False, 1, 0.1, 1e-5)
    assert TestReport([ok], [1], 1e-3).verdict == "pass"
    assert TestReport([ok, bad], [1], 1e-3).verdict == "fail"


def test_exact_suite_passes_and_is_reproducible():
    plan = TrialPlan(seeds=list(range(6)), window_length=4000)
    a = run_exact_suite(plan)
    assert a.verdict == "pass", a.to_json()
    assert a.to_json() == run_exact_suite(plan).to_json()
    assert Fraction(a.get("globe_gap").detail["min_gap"]) >= 128


def test_mark_flip_breaks_the_round_trip():
    plan = TrialPlan(seeds=list(range(4)), window_length=4000, corruption="mark_flip",
                     tests=("roundtrip",))
    report = run_exact_suite(plan)
    assert report.verdict == "fail"
    assert not report.get("roundtrip").passed


def test_cellwise_marking_matches_the_whole_window_map():
    plan = TrialPlan(seeds=[3], dist=THIRDS, target_length=3000)
    target = Window(0, 3000)
    ts = collect_target(plan, 3, target, with_holding=False)
    c, gs = grow_until_covered(plan.rate, target, 3, plan.params)
    cells = special_cells(c, plan.params, "globes", gs)
    worst = max(-math.log2(p) for p in THIRDS.probs)
    extra = {cur.index: math.ceil((cur.index - prev.index) * worst) + 64
             for prev, cur in zip(cells, cells[1:])}
    refined = refine_points(c, extra, Fraction(BLOCK, 1 << 64), 3)
    out = psi_forward(refined, THIRDS, plan.params, globes=gs).output
    inside = [(p, m) for p, m in out.items() if 0 <= p < 3000]
    assert ts.marks == [m for _, m in inside]
    assert ts.unit_counts == [sum(k <= p < k + 1 for p, _ in inside) for k in range(3000)]


def test_statistical_suite_small_and_negative_control():
    tests = ("poisson_counts", "mark_frequencies", "mark_pairs", "marks_vs_gaps",
             "marks_vs_special_offset", "jump_gaps", "gaps_vs_states")
    plan = TrialPlan(seeds=list(range(4)), target_length=60000, tests=tests)
    report = run_statistical_suite(plan)
    assert report.verdict == "pass", report.to_json()
    broken = run_statistical_suite(TrialPlan(seeds=list(range(4)), target_length=60000,
                                             tests=tests, corruption="skip_resampling"))
    assert not broken.get("marks_vs_special_offset").passed


def test_fan_out_does_not_change_the_report():
    plan = TrialPlan(seeds=[1, 2, 3], target_length=5000,
                     tests=("poisson_counts", "mark_frequencies", "offsets_uniform"),
                     offset_window=1 << 14)
    assert run_statistical_suite(plan).to_json() == run_statistical_suite(plan, workers=2).to_json()


def test_offsets_suite_runs():
    plan = TrialPlan(seeds=[1, 2], tests=("offsets_uniform", "offsets_vs_outside"),
                     offset_window=1 << 17)
    report = run_statistical_suite(plan)
    assert report.get("offsets_uniform").sample_size > 100
    assert report.verdict == "pass", report.to_json()


def test_coding_window_report():
    report = measure_coding_windows(TrialPlan(seeds=list(range(20)), window_length=4000))
    r = report.get("coding_windows")
    assert r.detail["finite"] + sum(r.detail["undetermined"].values()) == 20
    assert r.passed == (r.detail["finite"] == 20)
