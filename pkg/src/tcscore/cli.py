"""Command-line interface: score, report, simulate, and validate datasets.

Exit codes: 0 success, 1 data or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import report as reporting
from .dataset import audit_hashes, dedup, stats
from .records import (
    IngestError,
    load_manifests,
    load_records,
    write_manifests,
    write_records,
)
from .scoring import (
    ScoreConfig,
    classify,
    components,
    error_aware_score,
    join_samples,
    score_curve,
    speedup_score,
)
from .simulator import SimSpec, records_header, simulate

__all__ = ["build_parser", "main", "run"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcscore",
        description="Correctness-aware speedup scoring for tensor-compiler benchmark runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_command(name: str, func, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text, description=help_text)
        cmd.set_defaults(func=func)
        return cmd

    def add_scoring_flags(cmd: argparse.ArgumentParser) -> None:
        cmd.add_argument("--p", type=float, default=None, help="slowdown penalty exponent in (0,1)")
        cmd.add_argument("--b", type=float, default=None, help="failure penalty factor in (0,1)")
        cmd.add_argument(
            "--grid",
            default=None,
            help="comma-separated tolerance levels (use --grid='-10,...,4' for negatives)",
        )

    def add_output_flags(cmd: argparse.ArgumentParser, formats=("csv", "json", "md")) -> None:
        cmd.add_argument("--out", default=None, help="output file (default: stdout)")
        cmd.add_argument("--format", choices=formats, default=formats[0], help="output format")

    cmd = add_command("score", _cmd_score, "Score a records file at a single tolerance level.")
    cmd.add_argument("--records", required=True)
    cmd.add_argument("--manifests", default=None, help="optional; enables join validation")
    cmd.add_argument("--t", type=float, default=0.0, help="tolerance level (must be on the grid)")
    add_scoring_flags(cmd)

    cmd = add_command("curve", _cmd_curve, "Export full-precision scores over the whole grid.")
    cmd.add_argument("--records", required=True)
    cmd.add_argument("--manifests", required=True)
    add_scoring_flags(cmd)
    add_output_flags(cmd)

    cmd = add_command("report", _cmd_report, "Render the score table (3 decimals, '-' for S at t > 0).")
    cmd.add_argument("--records", required=True)
    cmd.add_argument("--manifests", required=True)
    add_scoring_flags(cmd)
    add_output_flags(cmd)

    cmd = add_command("violin", _cmd_violin, "Per-group log2 speedups of correct samples at level 0.")
    cmd.add_argument("--records", required=True)
    cmd.add_argument("--manifests", required=True)
    add_scoring_flags(cmd)
    add_output_flags(cmd, formats=("json", "csv", "md"))

    cmd = add_command("stats", _cmd_stats, "Category shares and operator-count histograms.")
    cmd.add_argument("--manifests", required=True)
    add_output_flags(cmd, formats=("json", "csv", "md"))

    cmd = add_command("dedup", _cmd_dedup, "Drop graph-hash duplicates, keeping first occurrences.")
    cmd.add_argument("--manifests", required=True)
    cmd.add_argument("--out", required=True, help="output manifests file")

    cmd = add_command("simulate", _cmd_simulate, "Generate a synthetic manifests/records pair.")
    cmd.add_argument("--spec", default=None, help="JSON workload spec file")
    cmd.add_argument("--seed", type=int, default=None, help="override the spec seed")
    cmd.add_argument("--n", type=int, default=None, help="override the sample count")
    cmd.add_argument("--manifests", default="manifests.jsonl", help="output manifests file")
    cmd.add_argument("--records", default="records.jsonl", help="output records file")
    add_scoring_flags(cmd)

    cmd = add_command("validate", _cmd_validate, "Validate dataset files and their cross-references.")
    cmd.add_argument("--manifests", default=None)
    cmd.add_argument("--records", default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        levels = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"bad grid {text!r}: expected comma-separated numbers") from None
    if not levels:
        raise ValueError("grid must be nonempty")
    return levels


def _config(args, header=None) -> ScoreConfig:
    """Assemble scoring settings: defaults, then file header, then flags."""
    cfg = ScoreConfig() if header is None else ScoreConfig.from_header(header)
    grid_neg, grid_pos = cfg.grid_neg, cfg.grid_pos
    if getattr(args, "grid", None):
        levels = _parse_grid(args.grid)
        grid_neg = tuple(t for t in levels if t <= 0)
        grid_pos = tuple(t for t in levels if t > 0)
    return ScoreConfig(
        degradation_penalty=args.p if args.p is not None else cfg.degradation_penalty,
        failure_penalty=args.b if args.b is not None else cfg.failure_penalty,
        grid_neg=grid_neg,
        grid_pos=grid_pos,
    )


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _load_scoring_inputs(args, *, need_manifests: bool):
    header, records = load_records(args.records)
    cfg = _config(args, header)
    manifests = None
    if args.manifests is not None:
        manifests = load_manifests(args.manifests)
    elif need_manifests:
        raise ValueError("--manifests is required")
    return manifests, records, cfg


def _cmd_score(args) -> int:
    manifests, records, cfg = _load_scoring_inputs(args, need_manifests=False)
    if manifests is not None:
        join_samples(manifests, records)
    if not records:
        raise ValueError("no samples")
    t = float(args.t)
    classified = [classify(record, t, cfg) for record in records]
    comp = components(classified, t, cfg)
    payload = {
        "t": t,
        "S": speedup_score(comp, cfg) if t <= 0 else None,
        "ES": error_aware_score(comp, cfg),
        "alpha": comp.geomean_speedup,
        "beta": comp.geomean_slowdown,
        "lambda": comp.correct_fraction,
        "eta": comp.slowdown_fraction,
        "gamma": comp.penalty,
        "total": comp.total,
        "correct": comp.correct,
        "errors": comp.errors,
    }
    print(json.dumps(payload))
    return 0


def _cmd_curve(args) -> int:
    manifests, records, cfg = _load_scoring_inputs(args, need_manifests=True)
    curve = score_curve(manifests, records, cfg)
    _emit(reporting.render_curve(curve, args.format), args.out)
    return 0


def _cmd_report(args) -> int:
    manifests, records, cfg = _load_scoring_inputs(args, need_manifests=True)
    curve = score_curve(manifests, records, cfg)
    _emit(reporting.render_table(curve, args.format), args.out)
    return 0


def _cmd_violin(args) -> int:
    manifests, records, cfg = _load_scoring_inputs(args, need_manifests=True)
    groups = reporting.violin_data(manifests, records, cfg)
    _emit(reporting.render_violin(groups, args.format), args.out)
    return 0


def _cmd_stats(args) -> int:
    manifests = load_manifests(args.manifests)
    _emit(reporting.render_stats(stats(manifests), args.format), args.out)
    return 0


def _cmd_dedup(args) -> int:
    manifests = load_manifests(args.manifests)
    kept, dropped = dedup(manifests)
    write_manifests(args.out, kept)
    print(f"kept {len(kept)} dropped {len(dropped)}")
    return 0


def _cmd_simulate(args) -> int:
    if args.spec is not None:
        spec = SimSpec.from_dict(json.loads(Path(args.spec).read_text(encoding="utf-8")))
    else:
        spec = SimSpec()
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.n is not None:
        spec = replace(spec, n_samples=args.n)
    cfg = _config(args)
    manifests, records = simulate(spec, cfg)
    write_manifests(args.manifests, manifests)
    write_records(args.records, records_header(spec, cfg), records)
    print(
        f"wrote {len(manifests)} manifests to {args.manifests}"
        f" and {len(records)} records to {args.records}"
    )
    return 0


def _cmd_validate(args) -> int:
    if args.manifests is None and args.records is None:
        raise ValueError("nothing to validate: pass --manifests and/or --records")
    manifests = None
    if args.manifests is not None:
        manifests = load_manifests(args.manifests)
        mismatched = audit_hashes(manifests)
        if mismatched:
            preview = ", ".join(repr(s) for s in mismatched[:5])
            raise ValueError(
                f"graph_hash does not match recorded inputs for {len(mismatched)}"
                f" samples: {preview}"
            )
    records = None
    if args.records is not None:
        _, records = load_records(args.records)
    if manifests is not None and records is not None:
        join_samples(manifests, records)
    parts = []
    if manifests is not None:
        parts.append(f"{len(manifests)} manifests")
    if records is not None:
        parts.append(f"{len(records)} records")
    print("ok: " + ", ".join(parts))
    return 0
