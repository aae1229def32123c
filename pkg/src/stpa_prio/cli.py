"""Command-line interface for the prioritisation toolchain.

Subcommands: validate, rank-ucas, score, sensitivity, prioritise,
rank-shift. Exit codes: 0 success, 1 usage or validation error,
2 runtime error. Every output path is printed on success. The bundled
eVTOL case-study dataset is available as ``--input casestudy``.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import pipeline
from .dataset import load_dataset
from .engine import saw, sensitivity_oat
from .errors import (
    ConfigError,
    DatasetError,
    EmptyInput,
    IoError,
    MalformedId,
    MissingPriority,
    StpaPrioError,
    TooFewRequirements,
)
from .matrix import uca_grid
from .model import SAMPLING_MODES
from .render import emit_matrix, emit_rank_shift
from .report import emit_report, emit_results

CASESTUDY_DIR = Path(__file__).parent / "data" / "casestudy"

_VALIDATION_ERRORS = (
    ConfigError,
    DatasetError,
    MalformedId,
    TooFewRequirements,
    EmptyInput,
    MissingPriority,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract is exit 1.
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stpa-prio", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--input", required=True,
                        help="dataset directory, JSON file, or 'casestudy'")
    common.add_argument("--out-dir", default=None, help="directory for output files")
    common.add_argument("--seed", type=int, default=None,
                        help="simulation seed (default 42)")
    common.add_argument("--iterations", type=int, default=None,
                        help="Monte-Carlo iterations (default 1000)")
    common.add_argument("--perturbation", type=float, default=None,
                        help="factor perturbation fraction (default 0.10)")
    common.add_argument("--mode", choices=SAMPLING_MODES, default=None,
                        help="sampling mode (default uniform-pct)")
    common.add_argument("--weights", default=None, metavar="W1,W2,W3,W4",
                        help="type,likelihood,time,cost weights (default 0.4,0.3,0.15,0.15)")
    common.add_argument("--workers", type=int, default=None,
                        help="parallel simulation workers (default 1)")
    common.add_argument("--all-bands", action="store_true",
                        help="disable the UCA P1/P2 pre-filter and analyse all bands")
    common.add_argument("--format", choices=("csv", "json", "both"), default="csv",
                        help="report output format (default csv)")

    sub.add_parser("validate", parents=[common], help="schema-check a dataset")
    sub.add_parser("rank-ucas", parents=[common], help="score and band the UCAs")
    sub.add_parser("score", parents=[common], help="SAW + Monte-Carlo statistics")
    sub.add_parser("sensitivity", parents=[common], help="one-at-a-time factor sensitivity")
    prio = sub.add_parser("prioritise", parents=[common],
                          help="full pipeline: report, matrix, and shift diagram")
    prio.add_argument("--seed2", type=int, default=None,
                      help="seed of the comparison run (default seed+1)")
    shift = sub.add_parser("rank-shift", parents=[common],
                           help="compare final ranks across two seeds")
    shift.add_argument("--seed2", type=int, default=None,
                       help="seed of the comparison run (default seed+1)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_flags(args)
        return _dispatch(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StpaPrioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _check_flags(args) -> None:
    if args.iterations is not None and args.iterations < 1:
        raise _UsageError("--iterations: iterations must be >= 1")
    if args.perturbation is not None and not 0 <= args.perturbation < 1:
        raise _UsageError("--perturbation: must satisfy 0 <= p < 1")
    if args.workers is not None and args.workers < 1:
        raise _UsageError("--workers: must be >= 1")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise _UsageError("--seed: must be a 64-bit unsigned integer")


def _parse_weights(raw: str | None):
    if raw is None:
        return None
    parts = raw.split(",")
    if len(parts) != 4:
        raise _UsageError("--weights: expected four comma-separated values")
    try:
        weights = tuple(float(p) for p in parts)
    except ValueError:
        raise _UsageError(f"--weights: {raw!r} is not a list of numbers") from None
    if any(w < 0 for w in weights):
        raise _UsageError("--weights: weights must be non-negative")
    return weights


def _config_for(args, dataset):
    return pipeline.resolve_config(
        dataset.config_overrides,
        weights=_parse_weights(args.weights),
        iterations=args.iterations,
        perturbation=args.perturbation,
        seed=args.seed,
        sampling_mode=args.mode,
        workers=args.workers,
        prefilter_bands=False if args.all_bands else None,
    )


def _dispatch(args) -> int:
    dataset = load_dataset(_resolve_input(args.input))
    if args.command == "validate":
        print(f"dataset OK: {len(dataset.ucas)} UCAs, "
              f"{len(dataset.requirements)} requirements")
        return 0

    config = _config_for(args, dataset)
    out_dir = Path(args.out_dir) if args.out_dir else None

    if args.command == "rank-ucas":
        return _cmd_rank_ucas(dataset, out_dir)
    if args.command == "score":
        return _cmd_score(dataset, config, out_dir)
    if args.command == "sensitivity":
        return _cmd_sensitivity(dataset, config, out_dir)
    if args.command == "prioritise":
        return _cmd_prioritise(dataset, config, args, out_dir or Path("out"))
    if args.command == "rank-shift":
        return _cmd_rank_shift(dataset, config, args, out_dir)
    raise _UsageError(f"unknown command {args.command!r}")


def _resolve_input(token: str) -> Path:
    if token == "casestudy":
        return CASESTUDY_DIR
    return Path(token)


def _cmd_rank_ucas(dataset, out_dir) -> int:
    results = pipeline.rank_ucas(dataset)
    print(f"{'UCA ID':<24} {'EJ':>8} {'SIF':>8} {'Score':>9}  Band")
    for r in results:
        print(f"{r.uca_id:<24} {r.ej:>8.2f} {r.sif:>8.2f} {r.priority_score:>9.2f}  "
              f"{r.band.name}")
    if out_dir is not None:
        csv_path = out_dir / "uca_priorities.csv"
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["uca_id", "ej", "sif", "priority_score", "band"])
            for r in results:
                writer.writerow([r.uca_id, _fmt2(r.ej), _fmt2(r.sif),
                                 _fmt2(r.priority_score), r.band.name])
        svg_path = emit_matrix(
            uca_grid(results), out_dir / "uca_matrix.svg",
            title="UCA Prioritisation Matrix",
            x_labels=("SIF1", "SIF2", "SIF3", "SIF4", "SIF5"),
            y_labels=("EJ5", "EJ4", "EJ3", "EJ2", "EJ1"),
        )
        print(csv_path)
        print(svg_path)
    return 0


def _cmd_score(dataset, config, out_dir) -> int:
    requirements, outcomes = pipeline.run_simulation(dataset, config)
    modal = {r.req_id: saw(r.assessment, config, r.req_id).value for r in requirements}
    ordered = sorted(outcomes, key=lambda o: (o.requirement_score, o.req_id))
    print(f"{'Req ID':<28} {'SAW':>6} {'MeanRank':>9} {'Sigma':>7} {'RS':>8} {'CIupper':>9}")
    rows = []
    for o in ordered:
        print(f"{o.req_id:<28} {modal[o.req_id]:>6.3f} {o.mean_rank:>9.3f} "
              f"{o.rank_sigma:>7.3f} {o.requirement_score:>8.3f} {o.ci_upper:>9.4f}")
        rows.append([o.req_id, f"{modal[o.req_id]:.4f}", f"{o.mean_rank:.4f}",
                     f"{o.rank_sigma:.4f}", f"{o.requirement_score:.4f}", f"{o.ci_upper:.4f}"])
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "scores.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["req_id", "saw", "mean_rank", "rank_sigma",
                             "requirement_score", "ci_upper"])
            writer.writerows(rows)
        print(path)
    return 0


def _cmd_sensitivity(dataset, config, out_dir) -> int:
    _, _, requirements = pipeline.retained_requirements(dataset, config)
    if not requirements:
        raise TooFewRequirements("no requirements remain after the band pre-filter")
    results = sensitivity_oat(requirements, config)
    print(f"{'Req ID':<28} {'Factor':<11} {'Mode':>6} {'AtLow':>6} {'AtHigh':>7} {'MaxShift':>9}")
    for r in results:
        print(f"{r.req_id:<28} {r.factor:<11} {r.rank_at_mode:>6.1f} {r.rank_at_lower:>6.1f} "
              f"{r.rank_at_upper:>7.1f} {r.max_shift:>9.1f}")
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "sensitivity.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["req_id", "factor", "rank_at_mode", "rank_at_lower",
                             "rank_at_upper", "max_shift"])
            for r in results:
                writer.writerow([r.req_id, r.factor, _fmt2(r.rank_at_mode),
                                 _fmt2(r.rank_at_lower), _fmt2(r.rank_at_upper),
                                 _fmt2(r.max_shift)])
        print(path)
    return 0


def _cmd_prioritise(dataset, config, args, out_dir: Path) -> int:
    result = pipeline.prioritise(dataset, config)
    seed2 = args.seed2 if args.seed2 is not None else config.seed + 1
    shifts = pipeline.dual_run_shift(dataset, config, seed2)

    written = []
    if args.format in ("csv", "both"):
        written.append(emit_report(result.rows, out_dir / "report.csv"))
    if args.format in ("json", "both"):
        written.append(emit_results(result.rows, result.assignments,
                                    result.outcomes, out_dir / "results.json"))
    written.append(emit_matrix(result.matrix, out_dir / "matrix.svg"))
    written.append(emit_rank_shift(shifts, out_dir / "rank_shift.svg"))
    for path in written:
        print(path)
    return 0


def _cmd_rank_shift(dataset, config, args, out_dir) -> int:
    seed2 = args.seed2 if args.seed2 is not None else config.seed + 1
    shifts = pipeline.dual_run_shift(dataset, config, seed2)
    print(f"{'Req ID':<28} {'RankA':>6} {'RankB':>6} {'Shift':>6}  Flagged")
    for e in shifts:
        print(f"{e.req_id:<28} {e.rank_a:>6} {e.rank_b:>6} {e.shift:>6}  "
              f"{'yes' if e.flagged else 'no'}")
    if out_dir is not None:
        path = emit_rank_shift(shifts, out_dir / "rank_shift.svg")
        print(path)
    return 0


def _fmt2(value: float) -> str:
    return f"{value:.2f}"


if __name__ == "__main__":
    sys.exit(main())
