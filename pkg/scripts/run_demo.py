#!/usr/bin/env python3
"""End-to-end demo: simulate a workload, score it, emit every report.

Writes manifests/records plus the score table, curve export, violin data,
and dataset stats into --out-dir, then prints the table.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from tcscore.dataset import stats
from tcscore.records import write_manifests, write_records
from tcscore.report import render_curve, render_stats, render_table, render_violin, violin_data
from tcscore.scoring import ScoreConfig, score_curve
from tcscore.simulator import SimSpec, records_header, simulate


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--out-dir", type=Path, default=Path("demo_out"))
    args = parser.parse_args()

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    cfg = ScoreConfig()
    spec = SimSpec(seed=args.seed, n_samples=args.n)

    manifests, records = simulate(spec, cfg)
    write_manifests(out / "manifests.jsonl", manifests)
    write_records(out / "records.jsonl", records_header(spec, cfg), records)

    curve = score_curve(manifests, records, cfg)
    (out / "table.md").write_text(render_table(curve, "md"))
    (out / "curve.csv").write_text(render_curve(curve, "csv"))
    (out / "violin.json").write_text(render_violin(violin_data(manifests, records, cfg)))
    (out / "stats.json").write_text(render_stats(stats(manifests)))

    print(f"seed={spec.seed} n={spec.n_samples} -> {out}/")
    print(render_table(curve, "md"))


if __name__ == "__main__":
    main()
