from __future__ import annotations

import json
from fractions import Fraction

import pytest

from finitary.borel import MarkDistribution
from finitary.fileio import (FormatError, dumps, globes_csv, read_json, read_points,
                             read_trajectory, witness_dict, write_points, write_trajectory)
from finitary.flow import MarkovSpec, sample_ctmc
from finitary.marking import psi_forward, special_cells
from finitary.pointproc import PointConfiguration, Window, refine_points, sample_poisson
from finitary.selection import find_globes

HALF = MarkDistribution.from_probs([Fraction(1, 2), Fraction(1, 2)])


def _cored():
    seed = 0
    while True:
        c = sample_poisson(1, Window(-4000, 4000), seed)
        if len(special_cells(c)) >= 2:
            return c
        seed += 1


def test_points_round_trip(tmp_path):
    c = sample_poisson(1, Window(-50, 50), 4)
    write_points(tmp_path / "p.csv", c)
    assert read_points(tmp_path / "p.csv") == c


def test_marked_round_trip_keeps_unmarked_points(tmp_path):
    out = psi_forward(_cored(), HALF).output
    assert None in out.marks
    write_points(tmp_path / "m.csv", out)
    back = read_points(tmp_path / "m.csv")
    assert back == out and back.origin_index == out.origin_index


def test_huge_denominators_survive(tmp_path):
    c = sample_poisson(1, Window(0, 20), 1)
    fine = refine_points(c, {0: 20000}, Fraction(1, 1 << 64), 1)
    assert max(p.denominator for p in fine.points).bit_length() > 15000
    write_points(tmp_path / "f.csv", fine)
    assert read_points(tmp_path / "f.csv") == fine


def test_trajectory_round_trip(tmp_path):
    spec = MarkovSpec(("a", "b"), [[0, 1], [1, 0]], 1)
    traj = sample_ctmc(spec, Window(0, 40), 2)
    write_trajectory(tmp_path / "t.csv", traj)
    assert read_trajectory(tmp_path / "t.csv") == traj


def test_globes_csv_lists_every_globe():
    gs = find_globes(PointConfiguration(Window(-200, 400), [0, Fraction(5, 2), 200]))
    lines = globes_csv(gs).splitlines()
    assert lines[0].startswith("# certified")
    assert lines[2:] == ["0,1,3,2,1,5/2", "200,201,203,202,0,"]


@pytest.mark.parametrize("text", [
    "position\n1\n",
    "# window 0 10\nposition\n1\nabc\n",
    "# window 0 10\nposition\n3\n2\n",
    "# window 0 10\nposition\n11\n",
    "# window 0 10\nplace\n1\n",
    "# window 10 0\nposition\n",
])
def test_malformed_point_files(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(FormatError):
        read_points(path)


def test_json_helpers(tmp_path):
    text = dumps({"b": Fraction(1, 3), "a": Window(0, 2)})
    assert json.loads(text) == {"a": ["0", "2"], "b": "1/3"}
    (tmp_path / "x.json").write_text("{not json")
    with pytest.raises(FormatError):
        read_json(tmp_path / "x.json")


def test_witness_dict_is_serialisable():
    r = psi_forward(_cored(), HALF)
    d = json.loads(dumps(witness_dict(r)))
    assert d["partition"] == "globes"
    assert len(d["cells"]) == len(r.witness)
