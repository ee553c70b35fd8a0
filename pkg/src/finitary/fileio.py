"""CSV and JSON formats for configurations, globes, trajectories and audit records.

Positions are written as exact rationals (``p`` or ``p/q``). Comment lines
starting with ``#`` carry metadata: ``# window lo hi`` always, and
``# origin_index k`` or ``# initial_state s`` where they apply. Marks and
states are written as strings; an empty field is an unmarked point or an
unknown state.
"""

from __future__ import annotations

import csv
import json
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterator, Optional

from .marking import PsiResult
from .pointproc import MarkedConfiguration, PointConfiguration, Window
from .selection import GlobeSet
from .flow import Trajectory


class FormatError(ValueError):
    """A file does not follow the expected layout."""


@contextmanager
def _big_ints() -> Iterator[None]:
    # positions at high precision have numerators far beyond the default str limit
    saved = sys.get_int_max_str_digits() if hasattr(sys, "get_int_max_str_digits") else None
    if saved is not None:
        sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        if saved is not None:
            sys.set_int_max_str_digits(saved)


def _meta_lines(lines: list[str]) -> tuple[dict[str, list[str]], list[str]]:
    meta, body = {}, []
    for line in lines:
        if line.startswith("#"):
            parts = line[1:].split()
            if parts:
                meta[parts[0]] = parts[1:]
        elif line.strip():
            body.append(line)
    return meta, body


def _window(meta: dict, path) -> Window:
    if "window" not in meta or len(meta["window"]) != 2:
        raise FormatError(f"{path}: missing '# window lo hi' line")
    try:
        return Window(*(Fraction(x) for x in meta["window"]))
    except ValueError as exc:
        raise FormatError(f"{path}: bad window: {exc}") from exc


def _read(path) -> list[str]:
    return Path(path).read_text().splitlines()


def _rows(body: list[str], path) -> tuple[list[str], list[list[str]]]:
    if not body:
        raise FormatError(f"{path}: no header row")
    rows = list(csv.reader(body))
    return rows[0], rows[1:]


def _fraction(text: str, path, line: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"{path}: row {line}: {text[:40]!r} is not a rational") from exc


def _config(window: Window, pts: list[Fraction], path) -> PointConfiguration:
    if any(a >= b for a, b in zip(pts, pts[1:])):
        raise FormatError(f"{path}: positions must be strictly increasing")
    try:
        return PointConfiguration(window, pts)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _symbol(text: str) -> Optional[str]:
    return text if text != "" else None


# -- point configurations -------------------------------------------------------

def points_csv(config: PointConfiguration | MarkedConfiguration) -> str:
    marked = isinstance(config, MarkedConfiguration)
    base = config.base if marked else config
    w = base.window
    with _big_ints():
        lines = [f"# window {w.lo} {w.hi}"]
        if marked:
            k = config.origin_index
            lines.append(f"# origin_index {'none' if k is None else k}")
            lines.append("position,mark")
            lines += [f"{p},{'' if m is None else m}" for p, m in zip(base.points, config.marks)]
        else:
            lines.append("position")
            lines += [str(p) for p in base.points]
    return "\n".join(lines) + "\n"


def write_points(path, config: PointConfiguration | MarkedConfiguration) -> None:
    Path(path).write_text(points_csv(config))


def read_points(path) -> PointConfiguration | MarkedConfiguration:
    """Read a configuration; a ``mark`` column gives a marked configuration."""
    with _big_ints():
        meta, body = _meta_lines(_read(path))
        window = _window(meta, path)
        header, rows = _rows(body, path)
        if header not in (["position"], ["position", "mark"]):
            raise FormatError(f"{path}: unexpected header {header}")
        pts = [_fraction(r[0], path, i + 2) for i, r in enumerate(rows)]
    config = _config(window, pts, path)
    if len(header) == 1:
        return config
    return MarkedConfiguration(config, tuple(_symbol(r[1]) if len(r) > 1 else None for r in rows))


# -- globes -----------------------------------------------------------------------

def globes_csv(gs: GlobeSet) -> str:
    c = gs.certified
    lines = [f"# certified {c.lo} {c.hi}", "trigger,lo,hi,center,special,special_point"]
    for g in gs.globes:
        sp = "" if g.special_point is None else str(g.special_point)
        lines.append(f"{g.trigger},{g.lo},{g.hi},{g.center},{int(g.special)},{sp}")
    return "\n".join(lines) + "\n"


def write_globes(path, gs: GlobeSet) -> None:
    with _big_ints():
        Path(path).write_text(globes_csv(gs))


# -- trajectories -----------------------------------------------------------------

def trajectory_csv(traj: Trajectory) -> str:
    w = traj.window
    init = "" if traj.initial_state is None else str(traj.initial_state)
    with _big_ints():
        lines = [f"# window {w.lo} {w.hi}", f"# initial_state {init}".rstrip(), "position,state"]
        lines += [f"{p},{'' if s is None else s}" for p, s in zip(traj.jumps.points, traj.states)]
    return "\n".join(lines) + "\n"


def write_trajectory(path, traj: Trajectory) -> None:
    Path(path).write_text(trajectory_csv(traj))


def read_trajectory(path) -> Trajectory:
    with _big_ints():
        meta, body = _meta_lines(_read(path))
        window = _window(meta, path)
        header, rows = _rows(body, path)
        if header != ["position", "state"]:
            raise FormatError(f"{path}: unexpected header {header}")
        pts = [_fraction(r[0], path, i + 2) for i, r in enumerate(rows)]
    init = meta.get("initial_state") or [""]
    states = tuple(_symbol(r[1]) if len(r) > 1 else None for r in rows)
    return Trajectory(_config(window, pts, path), states, _symbol(init[0]))


# -- JSON -------------------------------------------------------------------------

def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Window):
        return [str(x.lo), str(x.hi)]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def dumps(obj: Any) -> str:
    with _big_ints():
        return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def witness_dict(result: PsiResult) -> dict:
    """Audit record of a marking run: one entry per resampled special point."""
    return {
        "partition": result.partition,
        "core_region": result.core_region,
        "core_indices": list(result.core_indices),
        "cells": [{"center": r.center, "special_point": r.special_point,
                   "new_point": r.new_point, "n": r.n, "v": r.v, "g": r.g,
                   "marks": list(r.marks), "bits_available": r.bits_available,
                   "bits_needed": r.bits_needed} for r in result.witness],
    }
