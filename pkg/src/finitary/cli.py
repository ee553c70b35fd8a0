"""Command-line interface.

Every command reads a JSON run config (``--config``) and writes CSV or JSON
files. Exit codes: 0 success or pass, 2 validation failure, 3 undetermined
output (no grounding gap or too few special globes), 4 file errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from . import fileio
from .borel import MarkDistribution
from .errors import FinitaryError, Undetermined
from .flow import (IdentityEncoder, MarkovSpec, SlidingBlockEncoder, assemble_trajectory,
                   disassemble, sample_ctmc, validate_target)
from .marking import coding_window, psi_forward, psi_inverse
from .pointproc import MarkedConfiguration, PointConfiguration, Window, as_rational, sample_poisson
from .selection import SelectionParams, find_globes
from .verify import TrialPlan, measure_coding_windows, run_exact_suite, run_statistical_suite

EXIT_OK, EXIT_INVALID, EXIT_UNDETERMINED, EXIT_IO = 0, 2, 3, 4
SUITES = ("exact", "statistical", "coding_windows")


class ConfigError(ValueError):
    pass


def _rational(d: dict, key: str, default=None) -> Fraction:
    if key not in d:
        if default is None:
            raise ConfigError(f"config is missing {key!r}")
        return as_rational(default)
    try:
        return as_rational(d[key])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key!r}: {exc}") from exc


def _encoder(d: Optional[dict], dist: MarkDistribution):
    if d is None or d.get("type", "identity") == "identity":
        return IdentityEncoder(dist.alphabet)
    if d["type"] != "sliding_block":
        raise ConfigError(f"unknown encoder type {d['type']!r}")
    table = {tuple(ctx): out for ctx, out in d["table"]}
    inverse = {tuple(ctx): out for ctx, out in d["inverse_table"]}
    return SlidingBlockEncoder(tuple(d.get("alphabet_in", dist.alphabet)), tuple(d["alphabet_out"]),
                               int(d["radius"]), table, int(d["inverse_radius"]), inverse)


@dataclass
class RunConfig:
    """Everything a command needs, validated on load."""

    rate: Fraction
    window: Window
    seed: int = 0
    precision: int = 64
    params: SelectionParams = field(default_factory=SelectionParams)
    dist: MarkDistribution = field(
        default_factory=lambda: MarkDistribution.from_probs([Fraction(1, 2), Fraction(1, 2)]))
    partition: str = "globes"
    markov: Optional[MarkovSpec] = None
    encoder: Any = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        try:
            rate = _rational(d, "rate", 1)
            lo, hi = d.get("window", ["-1000", "1000"])
            window = Window(as_rational(lo), as_rational(hi))
            sel = d.get("selection", {})
            params = SelectionParams(_rational(sel, "lookback", 130), _rational(sel, "clearance", 5))
            if "distribution" in d:
                dist = MarkDistribution.from_pairs(
                    [(str(s), as_rational(p)) for s, p in d["distribution"]])
            else:
                dist = MarkDistribution.from_probs([Fraction(1, 2), Fraction(1, 2)])
            markov = None
            if d.get("markov") is not None:
                m = d["markov"]
                markov = MarkovSpec(tuple(str(s) for s in m["states"]), m["matrix"],
                                    as_rational(m.get("holding_rate", rate)))
                if markov.holding_rate != rate:
                    raise ConfigError(f"rate {rate} differs from the holding rate {markov.holding_rate}")
            partition = d.get("partition", "globes")
            if partition not in ("globes", "unit"):
                raise ConfigError(f"unknown partition {partition!r}")
            precision = int(d.get("precision", 64))
            if precision < 8:
                raise ConfigError("precision must be at least 8 bits")
            cfg = cls(rate, window, int(d.get("seed", 0)), precision, params, dist, partition,
                      markov, None)
            cfg.encoder = _encoder(d.get("encoder"), dist)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        if rate <= 0:
            raise ConfigError("rate must be positive")
        return cfg


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig.from_dict({})
    return RunConfig.from_dict(fileio.read_json(path))


# -- commands -----------------------------------------------------------------------

def _out(args, default: str) -> Path:
    return Path(args.out or default)


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


def command_sample(cfg: RunConfig, args) -> int:
    out = _out(args, "sample.csv")
    if args.kind == "ctmc":
        if cfg.markov is None:
            raise ConfigError("sampling a trajectory needs a 'markov' section")
        fileio.write_trajectory(out, sample_ctmc(cfg.markov, cfg.window, cfg.seed, cfg.precision))
    else:
        fileio.write_points(out, sample_poisson(cfg.rate, cfg.window, cfg.seed, cfg.precision))
    return EXIT_OK


def _read_plain(path) -> PointConfiguration:
    c = fileio.read_points(path)
    return c.base if isinstance(c, MarkedConfiguration) else c


def command_transform(cfg: RunConfig, args) -> int:
    config = _read_plain(args.input)
    gs = find_globes(config, cfg.params) if cfg.partition == "globes" else None
    result = psi_forward(config, cfg.dist, cfg.params, partition=cfg.partition, globes=gs)
    out = _out(args, "marked.csv")
    fileio.write_points(out, result.output)
    fileio.write_json(_sibling(out, ".witness.json"), fileio.witness_dict(result))
    if gs is not None:
        fileio.write_globes(_sibling(out, ".globes.csv"), gs)
    return EXIT_OK


def command_invert(cfg: RunConfig, args) -> int:
    marked = fileio.read_points(args.input)
    if not isinstance(marked, MarkedConfiguration):
        raise fileio.FormatError(f"{args.input}: no mark column")
    config = psi_inverse(marked, cfg.dist, cfg.params, partition=cfg.partition)
    fileio.write_points(_out(args, "points.csv"), config)
    return EXIT_OK


def command_assemble(cfg: RunConfig, args) -> int:
    if cfg.markov is not None:
        report = validate_target(cfg.markov, cfg.dist, cfg.rate)
        if not report.passed:
            print(fileio.dumps(report.to_dict()), file=sys.stderr, end="")
            return EXIT_INVALID
    marked = fileio.read_points(args.input)
    if not isinstance(marked, MarkedConfiguration):
        raise fileio.FormatError(f"{args.input}: no mark column")
    traj = assemble_trajectory(marked, cfg.encoder)
    fileio.write_trajectory(_out(args, "trajectory.csv"), traj)
    return EXIT_OK


def command_disassemble(cfg: RunConfig, args) -> int:
    traj = fileio.read_trajectory(args.input)
    fileio.write_points(_out(args, "marked.csv"), disassemble(traj, cfg.encoder))
    return EXIT_OK


def command_validate_target(cfg: RunConfig, args) -> int:
    if cfg.markov is None:
        raise ConfigError("validate-target needs a 'markov' section")
    report = validate_target(cfg.markov, cfg.dist, cfg.rate)
    text = fileio.dumps(report.to_dict())
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK if report.passed else EXIT_INVALID


def command_verify(cfg: RunConfig, args) -> int:
    d = fileio.read_json(args.plan)
    try:
        suites = d.pop("suites", ["exact"])
        if isinstance(suites, str):
            suites = [suites]
        unknown = set(suites) - set(SUITES)
        if unknown:
            raise ConfigError(f"unknown suites {sorted(unknown)}")
        workers = int(d.pop("workers", 1))
        if args.seed is not None:
            d["seeds"] = [args.seed]
        if args.precision is not None:
            d["precision"] = args.precision
        plan = TrialPlan.from_dict(d)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid plan: {exc}") from exc
    report = None
    for suite in SUITES:
        if suite not in suites:
            continue
        if suite == "exact":
            part = run_exact_suite(plan)
        elif suite == "statistical":
            part = run_statistical_suite(plan, workers=workers)
        else:
            part = measure_coding_windows(plan)
        report = part if report is None else report.merge(part)
    text = report.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK if report.verdict == "pass" else EXIT_INVALID


def command_coding_window(cfg: RunConfig, args) -> int:
    if args.input:
        config = _read_plain(args.input)
    else:
        config = sample_poisson(cfg.rate, cfg.window, cfg.seed, cfg.precision)
    center = as_rational(args.center)
    w = coding_window(config, cfg.params, center)
    text = fileio.dumps({"center": center, "coding_window": w, "window": config.window})
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


COMMANDS = {
    "sample": command_sample,
    "transform": command_transform,
    "invert": command_invert,
    "assemble": command_assemble,
    "disassemble": command_disassemble,
    "validate-target": command_validate_target,
    "verify": command_verify,
    "coding-window": command_coding_window,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finitary",
        description="Exact marking of Poisson points and Markov path assembly.",
        epilog="Exit codes: 0 success, 2 validation failure, 3 undetermined, 4 file error.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config (rate, window, seed, precision, "
                        "selection, distribution, partition, markov, encoder)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output file (default depends on the command)")
    common.add_argument("--precision", type=int, help="override the sampler precision in bits")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("sample", parents=[common], help="sample Poisson points or a Markov path")
    p.add_argument("--kind", choices=("poisson", "ctmc"), default="poisson")
    for name, helptext in (("transform", "mark a configuration; also writes witness JSON and globes CSV"),
                           ("invert", "recover the unmarked configuration from marked output"),
                           ("assemble", "turn a marked configuration into a trajectory"),
                           ("disassemble", "read marks back off a trajectory")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("input", help="input CSV")
    sub.add_parser("validate-target", parents=[common],
                   help="check the config's Markov spec against the marks and rate")
    p = sub.add_parser("verify", parents=[common], help="run the verification suites of a plan")
    p.add_argument("plan", help="JSON trial plan; optional keys 'suites' and 'workers'")
    p = sub.add_parser("coding-window", parents=[common],
                       help="coding window of a sampled or given configuration")
    p.add_argument("input", nargs="?", help="input CSV (default: sample from the config)")
    p.add_argument("--center", default="0", help="centre of the output interval (default 0)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.precision is not None:
            if args.precision < 8:
                raise ConfigError("precision must be at least 8 bits")
            cfg.precision = args.precision
        return COMMANDS[args.command](cfg, args)
    except fileio.FormatError as exc:
        print(f"finitary: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"finitary: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Undetermined as exc:
        print(f"finitary: undetermined: {exc}", file=sys.stderr)
        return EXIT_UNDETERMINED
    except OSError as exc:
        print(f"{parser.prog} {args.command}: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return EXIT_IO
    except FinitaryError as exc:
        print(f"finitary: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
