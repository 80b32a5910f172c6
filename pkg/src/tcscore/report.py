"""Report rendering: score tables, curve exports, violin data, stats.

Table values print at 3 decimals with ties rounded away from zero; the
speedup-score column shows "-" at positive levels, where only the
error-aware score is defined. Curve exports keep full precision for
external plotting. All renderers are deterministic: identical inputs
produce byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Mapping, Sequence

from .dataset import StatsReport
from .records import RunRecord, SampleManifest
from .scoring import ScoreConfig, ScoreCurve, classify, join_samples

__all__ = [
    "CURVE_COLUMNS",
    "TABLE_COLUMNS",
    "render_curve",
    "render_stats",
    "render_table",
    "render_violin",
    "round_half_away",
    "table_rows",
    "violin_data",
]

TABLE_COLUMNS = ("t", "alpha", "beta", "lambda", "eta", "S(t)", "gamma", "ES(t)")

CURVE_COLUMNS = (
    "t",
    "total",
    "correct",
    "slowdowns",
    "errors",
    "errors_accuracy",
    "errors_crash",
    "errors_compile",
    "alpha",
    "beta",
    "lambda",
    "eta",
    "share_accuracy",
    "share_crash",
    "share_compile",
    "gamma",
    "S",
    "ES",
)


def round_half_away(value: float, decimals: int = 3) -> str:
    """Render at fixed decimals, ties away from zero."""
    quantum = Decimal(1).scaleb(-decimals)
    return str(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP))


def level_label(t: float) -> str:
    t = float(t)
    return str(int(t)) if t.is_integer() else repr(t)


def table_rows(curve: ScoreCurve) -> list[dict[str, str]]:
    """Score table rows keyed by the published column names."""
    rows = []
    for point in curve.points:
        comp = point.components
        rows.append(
            {
                "t": level_label(point.t),
                "alpha": round_half_away(comp.geomean_speedup),
                "beta": round_half_away(comp.geomean_slowdown),
                "lambda": round_half_away(comp.correct_fraction),
                "eta": round_half_away(comp.slowdown_fraction),
                "S(t)": "-"
                if point.speedup_score is None
                else round_half_away(point.speedup_score),
                "gamma": round_half_away(comp.penalty),
                "ES(t)": round_half_away(point.error_aware_score),
            }
        )
    return rows


def render_table(curve: ScoreCurve, fmt: str = "csv") -> str:
    rows = table_rows(curve)
    if fmt == "csv":
        return _csv(TABLE_COLUMNS, rows)
    if fmt == "md":
        return _md(TABLE_COLUMNS, rows)
    if fmt == "json":
        payload = []
        for row in rows:
            entry: dict[str, Any] = {"t": float(row["t"])}
            for column in TABLE_COLUMNS[1:]:
                entry[column] = None if row[column] == "-" else float(row[column])
            payload.append(entry)
        return _json(payload)
    raise ValueError(f"unknown format {fmt!r}")


def curve_rows(curve: ScoreCurve) -> list[dict[str, Any]]:
    """Full-precision rows with every component and score."""
    rows = []
    for point in curve.points:
        comp = point.components
        rows.append(
            {
                "t": point.t,
                "total": comp.total,
                "correct": comp.correct,
                "slowdowns": comp.slowdowns,
                "errors": comp.errors,
                "errors_accuracy": comp.errors_by_code[0],
                "errors_crash": comp.errors_by_code[1],
                "errors_compile": comp.errors_by_code[2],
                "alpha": comp.geomean_speedup,
                "beta": comp.geomean_slowdown,
                "lambda": comp.correct_fraction,
                "eta": comp.slowdown_fraction,
                "share_accuracy": comp.error_shares[0],
                "share_crash": comp.error_shares[1],
                "share_compile": comp.error_shares[2],
                "gamma": comp.penalty,
                "S": point.speedup_score,
                "ES": point.error_aware_score,
            }
        )
    return rows


def render_curve(curve: ScoreCurve, fmt: str = "csv") -> str:
    rows = curve_rows(curve)
    if fmt == "json":
        return _json(rows)
    if fmt in ("csv", "md"):
        cells = [
            {column: _plain(row[column]) for column in CURVE_COLUMNS} for row in rows
        ]
        return _csv(CURVE_COLUMNS, cells) if fmt == "csv" else _md(CURVE_COLUMNS, cells)
    raise ValueError(f"unknown format {fmt!r}")


def violin_data(
    manifests: Sequence[SampleManifest],
    records: Sequence[RunRecord],
    cfg: ScoreConfig | None = None,
) -> dict[tuple[str, str], list[float]]:
    """Per-(framework, task_category) log2 speedups of correct samples.

    Correctness is judged at level 0, which must be on the config grid.
    Negative values mark compiled runs slower than eager. Erroneous
    samples contribute nothing, but every group present in the manifests
    appears, possibly with an empty list.
    """
    cfg = cfg or ScoreConfig()
    pairs = join_samples(manifests, records)
    groups: dict[tuple[str, str], list[float]] = {}
    for manifest, _ in pairs:
        groups.setdefault((manifest.framework, manifest.task_category.value), [])
    for manifest, record in pairs:
        sample = classify(record, 0.0, cfg)
        if sample.error_code is None:
            key = (manifest.framework, manifest.task_category.value)
            groups[key].append(math.log2(sample.speedup))
    return dict(sorted(groups.items()))


def render_violin(groups: Mapping[tuple[str, str], Sequence[float]], fmt: str = "json") -> str:
    if fmt == "json":
        return _json(
            [
                {
                    "framework": framework,
                    "task_category": category,
                    "log2_speedups": list(values),
                }
                for (framework, category), values in groups.items()
            ]
        )
    if fmt in ("csv", "md"):
        columns = ("framework", "task_category", "log2_speedups")
        rows = [
            {
                "framework": framework,
                "task_category": category,
                "log2_speedups": ";".join(_plain(v) for v in values),
            }
            for (framework, category), values in groups.items()
        ]
        return _csv(columns, rows) if fmt == "csv" else _md(columns, rows)
    raise ValueError(f"unknown format {fmt!r}")


def render_stats(report: StatsReport, fmt: str = "json") -> str:
    if fmt == "json":
        return _json(
            {
                "total": report.total,
                "category_counts": dict(report.category_counts),
                "category_shares": dict(report.category_shares),
                "opcount_histograms": {
                    category: {str(bin_exp): count for bin_exp, count in hist.items()}
                    for category, hist in report.opcount_histograms.items()
                },
            }
        )
    if fmt in ("csv", "md"):
        share_columns = ("category", "count", "share_percent")
        share_rows = [
            {
                "category": category,
                "count": str(report.category_counts[category]),
                "share_percent": _plain(report.category_shares[category]),
            }
            for category in report.category_counts
        ]
        hist_columns = ("category", "bin_exponent", "count")
        hist_rows = [
            {"category": category, "bin_exponent": str(bin_exp), "count": str(count)}
            for category, hist in report.opcount_histograms.items()
            for bin_exp, count in hist.items()
        ]
        if fmt == "csv":
            return _csv(share_columns, share_rows) + "\n" + _csv(hist_columns, hist_rows)
        return _md(share_columns, share_rows) + "\n" + _md(hist_columns, hist_rows)
    raise ValueError(f"unknown format {fmt!r}")


def _plain(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(columns: Sequence[str], rows: Sequence[Mapping[str, str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[column] for column in columns])
    return buffer.getvalue()


def _md(columns: Sequence[str], rows: Sequence[Mapping[str, str]]) -> str:
    lines = [
        "| " + " | ".join(columns) + " |",
        "| " + " | ".join("---" for _ in columns) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(str(row[column]) for column in columns) + " |")
    return "\n".join(lines) + "\n"


def _json(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"
