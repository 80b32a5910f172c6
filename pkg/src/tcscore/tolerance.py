"""Dtype-dependent numeric tolerance schedules and closeness checks.

Numeric strictness is a single level t <= 0. Each scalar kind maps the
level to absolute and relative thresholds through a log-linear schedule
10**(slope * t), so loosening t raises both thresholds together and a
pair of outputs that passes at some level passes at every looser one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "DEFAULT_RULES",
    "ScalarKind",
    "ToleranceRule",
    "atol",
    "element_close",
    "load_rules",
    "min_passing_tolerance",
    "rtol",
]


class ScalarKind(Enum):
    """Scalar element kinds, each carrying its own tolerance schedule."""

    FLOAT16 = "float16"
    BFLOAT16 = "bfloat16"
    FLOAT32 = "float32"
    FLOAT64 = "float64"
    COMPLEX32 = "complex32"
    COMPLEX64 = "complex64"
    COMPLEX128 = "complex128"
    QUINT8 = "quint8"
    QUINT2X4 = "quint2x4"
    QUINT4X2 = "quint4x2"
    QINT8 = "qint8"
    QINT32 = "qint32"
    OTHER = "other"

    @classmethod
    def from_name(cls, name: str) -> "ScalarKind":
        """Parse a kind name; unknown names fall back to OTHER."""
        try:
            return cls(name)
        except ValueError:
            return cls.OTHER


@dataclass(frozen=True)
class ToleranceRule:
    """Schedule slopes for one kind: tolerance(t) = 10**(slope * t).

    A slope of None pins that tolerance to zero at every level, which
    turns the closeness check into exact comparison.
    """

    kind: ScalarKind
    atol_slope: float | None
    rtol_slope: float | None


DEFAULT_RULES: Mapping[ScalarKind, ToleranceRule] = {
    rule.kind: rule
    for rule in (
        ToleranceRule(ScalarKind.FLOAT16, 1.0, 3 / 5),
        ToleranceRule(ScalarKind.BFLOAT16, 1.0, 1.796 / 5),
        ToleranceRule(ScalarKind.FLOAT32, 1.0, 5.886 / 5),
        ToleranceRule(ScalarKind.FLOAT64, 7 / 5, 7 / 5),
        ToleranceRule(ScalarKind.COMPLEX32, 1.0, 3 / 5),
        ToleranceRule(ScalarKind.COMPLEX64, 1.0, 5.886 / 5),
        ToleranceRule(ScalarKind.COMPLEX128, 7 / 5, 7 / 5),
        ToleranceRule(ScalarKind.QUINT8, 1.0, 5.886 / 5),
        ToleranceRule(ScalarKind.QUINT2X4, 1.0, 5.886 / 5),
        ToleranceRule(ScalarKind.QUINT4X2, 1.0, 5.886 / 5),
        ToleranceRule(ScalarKind.QINT8, 1.0, 5.886 / 5),
        ToleranceRule(ScalarKind.QINT32, 1.0, 5.886 / 5),
        ToleranceRule(ScalarKind.OTHER, None, None),
    )
}


def load_rules(path: str | Path) -> dict[ScalarKind, ToleranceRule]:
    """Tolerance rule table with overrides merged from a JSON config file.

    The file maps kind names to {"atol_slope": ..., "rtol_slope": ...}; a
    null slope pins that tolerance to zero. Kinds the file does not name
    keep their built-in schedule.
    """
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: rule config must be a JSON object")
    rules = dict(DEFAULT_RULES)
    for name, entry in data.items():
        if not isinstance(entry, dict):
            raise ValueError(f"{path}: entry for {name!r} must be an object")
        kind = ScalarKind.from_name(name)
        rules[kind] = ToleranceRule(
            kind,
            _parse_slope(entry, "atol_slope", name, path),
            _parse_slope(entry, "rtol_slope", name, path),
        )
    return rules


def _parse_slope(entry: dict, key: str, name: str, path: Path) -> float | None:
    value = entry.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{path}: {name}.{key} must be a number or null")
    return float(value)


def atol(
    kind: ScalarKind,
    t: float,
    rules: Mapping[ScalarKind, ToleranceRule] | None = None,
) -> float:
    """Absolute threshold for ``kind`` at level t (t must be <= 0)."""
    return _threshold(kind, t, rules, "atol_slope")


def rtol(
    kind: ScalarKind,
    t: float,
    rules: Mapping[ScalarKind, ToleranceRule] | None = None,
) -> float:
    """Relative threshold for ``kind`` at level t (t must be <= 0)."""
    return _threshold(kind, t, rules, "rtol_slope")


def _threshold(
    kind: ScalarKind,
    t: float,
    rules: Mapping[ScalarKind, ToleranceRule] | None,
    attr: str,
) -> float:
    # Positive levels mean error forgiveness, not numeric thresholds.
    if t > 0:
        raise ValueError(f"tolerance level must be <= 0, got {t}")
    rule = (rules or DEFAULT_RULES)[kind]
    slope: float | None = getattr(rule, attr)
    if slope is None:
        return 0.0
    return 10.0 ** (slope * t)


def element_close(x, y, atol: float, rtol: float) -> bool:
    """Inclusive elementwise check: |x - y| <= atol + rtol * |y|.

    ``y`` is the reference element. Complex values compare through the
    modulus of the difference and of y. Non-finite values are close only
    to an identical non-finite value: NaN matches NaN and infinities must
    agree in sign, per component for complex values.
    """
    if not (_finite(x) and _finite(y)):
        cx, cy = complex(x), complex(y)
        return _component_match(cx.real, cy.real) and _component_match(cx.imag, cy.imag)
    return abs(x - y) <= atol + rtol * abs(y)


def _finite(value) -> bool:
    c = complex(value)
    return math.isfinite(c.real) and math.isfinite(c.imag)


def _component_match(a: float, b: float) -> bool:
    if math.isnan(a) or math.isnan(b):
        return math.isnan(a) and math.isnan(b)
    return a == b


def min_passing_tolerance(
    x: Sequence,
    y: Sequence,
    kind: ScalarKind,
    grid: Sequence[float],
    rules: Mapping[ScalarKind, ToleranceRule] | None = None,
) -> float | None:
    """Smallest grid level at which every element pair is close.

    ``grid`` must be strictly ascending with all levels <= 0. Returns
    None when some pair still fails at the loosest level. Both thresholds
    are nondecreasing in t, so passing is monotone and the ascending scan
    stops at the boundary.
    """
    lhs = np.asarray(x)
    rhs = np.asarray(y)
    if lhs.ndim != 1 or rhs.ndim != 1 or lhs.shape != rhs.shape:
        raise ValueError(
            f"element sequences must be 1-d and equal length, got {lhs.shape} vs {rhs.shape}"
        )
    if lhs.size == 0:
        raise ValueError("element sequences must be nonempty")
    levels = [float(t) for t in grid]
    if not levels:
        raise ValueError("tolerance grid is empty")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("tolerance grid must be strictly ascending")
    if levels[-1] > 0:
        raise ValueError("tolerance grid levels must be <= 0")

    finite = np.isfinite(lhs) & np.isfinite(rhs)
    if not bool(finite.all()):
        bad_lhs = lhs[~finite]
        bad_rhs = rhs[~finite]
        same = _nan_equal(bad_lhs.real, bad_rhs.real) & _nan_equal(bad_lhs.imag, bad_rhs.imag)
        if not bool(same.all()):
            return None
        lhs = lhs[finite]
        rhs = rhs[finite]
    diff = np.abs(lhs - rhs)
    magnitude = np.abs(rhs)
    for t in levels:
        bound = atol(kind, t, rules) + rtol(kind, t, rules) * magnitude
        if bool(np.all(diff <= bound)):
            return t
    return None


def _nan_equal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a == b) | (np.isnan(a) & np.isnan(b))
