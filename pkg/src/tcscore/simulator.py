"""Deterministic synthetic workload generator with fault injection.

Stands in for running real frameworks and compilers: per-sample speedups,
operator counts, and output perturbations are drawn from configurable
laws, producing a manifests/records pair that exercises the full scoring
pipeline. All draws come from one fixed-seed PCG64 stream in a fixed
order, so a given spec maps to byte-identical output files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .graphhash import HashInput, Topology, graph_hash
from .records import (
    CompileFailure,
    Completed,
    RecordsHeader,
    RunRecord,
    RuntimeCrash,
    SampleManifest,
    TaskCategory,
    TensorComparison,
)
from .scoring import ScoreConfig
from .tolerance import ScalarKind, min_passing_tolerance

__all__ = [
    "ErrorRates",
    "OpCountLaw",
    "SimSpec",
    "SpeedupLaw",
    "compare_outputs",
    "records_header",
    "simulate",
]

_OP_VOCAB = (
    "matmul",
    "conv2d",
    "add",
    "mul",
    "relu",
    "gelu",
    "softmax",
    "layer_norm",
    "reshape",
    "transpose",
    "reduce_sum",
    "embedding",
)
_BINARY_OPS = frozenset({"matmul", "add", "mul"})
_OUTPUT_LEN = 16

DEFAULT_CATEGORY_MIX: Mapping[TaskCategory, float] = {
    TaskCategory.CV: 0.478,
    TaskCategory.NLP: 0.395,
    TaskCategory.AUDIO: 0.04,
    TaskCategory.MULTIMODAL: 0.04,
    TaskCategory.SCIENTIFIC: 0.027,
    TaskCategory.OTHER: 0.02,
}

# Base magnitudes keep clean samples passing at level 0 even after the
# per-sample two-decade jitter applied in simulate().
DEFAULT_NOISE: Mapping[ScalarKind, float] = {
    ScalarKind.FLOAT16: 1e-4,
    ScalarKind.BFLOAT16: 1e-3,
    ScalarKind.FLOAT32: 1e-6,
    ScalarKind.FLOAT64: 1e-9,
}


@dataclass(frozen=True)
class SpeedupLaw:
    """Log2-normal law for per-sample speedups."""

    log2_mean: float = 0.35
    log2_stddev: float = 0.5

    def __post_init__(self) -> None:
        if self.log2_stddev < 0:
            raise ValueError("log2_stddev must be >= 0")


@dataclass(frozen=True)
class OpCountLaw:
    """Log2-normal law for per-sample operator counts."""

    log2_mean: float = 9.0
    log2_stddev: float = 1.2

    def __post_init__(self) -> None:
        if self.log2_stddev < 0:
            raise ValueError("log2_stddev must be >= 0")


@dataclass(frozen=True)
class ErrorRates:
    """Per-sample fault probabilities; the remainder runs clean."""

    accuracy_violation: float = 0.05
    runtime_crash: float = 0.03
    compile_failure: float = 0.07

    def __post_init__(self) -> None:
        rates = (self.accuracy_violation, self.runtime_crash, self.compile_failure)
        if any(not 0 <= r <= 1 for r in rates):
            raise ValueError("error rates must lie in [0, 1]")
        if sum(rates) > 1:
            raise ValueError("error rates must sum to at most 1")


@dataclass(frozen=True)
class SimSpec:
    """Full description of a synthetic workload; same spec, same bytes out."""

    seed: int = 0
    n_samples: int = 100
    framework: str = "synthetic"
    category_mix: Mapping[TaskCategory, float] = field(
        default_factory=lambda: dict(DEFAULT_CATEGORY_MIX)
    )
    speedup_law: SpeedupLaw = SpeedupLaw()
    error_rates: ErrorRates = ErrorRates()
    noise_law: Mapping[ScalarKind, float] = field(
        default_factory=lambda: dict(DEFAULT_NOISE)
    )
    opcount_law: OpCountLaw = OpCountLaw()

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not self.category_mix:
            raise ValueError("category_mix must be nonempty")
        if any(w < 0 for w in self.category_mix.values()):
            raise ValueError("category weights must be >= 0")
        if not sum(self.category_mix.values()) > 0:
            raise ValueError("category weights must not all be zero")
        if not self.noise_law:
            raise ValueError("noise_law must be nonempty")
        if any(m < 0 for m in self.noise_law.values()):
            raise ValueError("noise magnitudes must be >= 0")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SimSpec":
        """Build a spec from parsed JSON; unnamed fields keep defaults."""
        kwargs: dict[str, Any] = {}
        for key in ("seed", "n_samples"):
            if key in data:
                kwargs[key] = int(data[key])
        if "framework" in data:
            kwargs["framework"] = str(data["framework"])
        if "category_mix" in data:
            kwargs["category_mix"] = {
                TaskCategory.from_name(name): float(weight)
                for name, weight in data["category_mix"].items()
            }
        if "speedup_law" in data:
            kwargs["speedup_law"] = SpeedupLaw(**data["speedup_law"])
        if "error_rates" in data:
            kwargs["error_rates"] = ErrorRates(**data["error_rates"])
        if "noise_law" in data:
            kwargs["noise_law"] = {
                ScalarKind.from_name(name): float(magnitude)
                for name, magnitude in data["noise_law"].items()
            }
        if "opcount_law" in data:
            kwargs["opcount_law"] = OpCountLaw(**data["opcount_law"])
        return cls(**kwargs)


def compare_outputs(
    x, y, kind: ScalarKind, grid, index: int = 0
) -> TensorComparison:
    """Summarize one output pair as its smallest passing tolerance level."""
    return TensorComparison(index, kind, min_passing_tolerance(x, y, kind, grid))


def records_header(spec: SimSpec, cfg: ScoreConfig) -> RecordsHeader:
    return RecordsHeader(
        grid=cfg.full_grid,
        p=cfg.degradation_penalty,
        b=cfg.failure_penalty,
        producer=f"simulator seed={spec.seed}",
    )


def simulate(
    spec: SimSpec, cfg: ScoreConfig | None = None
) -> tuple[list[SampleManifest], list[RunRecord]]:
    """Generate a (manifests, records) pair for a synthetic workload.

    Clean samples carry comparisons whose min_passing_t reflects the
    injected noise through the tolerance schedules; accuracy-violation
    samples carry comparisons that never pass; crashes and compile
    failures carry the corresponding outcome and no compiled time.
    """
    cfg = cfg or ScoreConfig()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    categories = list(spec.category_mix)
    weights = np.array([spec.category_mix[c] for c in categories], dtype=float)
    probs = weights / weights.sum()
    kinds = list(spec.noise_law)
    rates = spec.error_rates

    manifests: list[SampleManifest] = []
    records: list[RunRecord] = []
    for i in range(spec.n_samples):
        sample_id = f"s{i:05d}"
        category = categories[int(rng.choice(len(categories), p=probs))]
        opcount = max(
            1,
            int(
                round(
                    2.0 ** rng.normal(spec.opcount_law.log2_mean, spec.opcount_law.log2_stddev)
                )
            ),
        )
        parameter_count = opcount * int(rng.integers(100, 5000))
        output_kinds = [
            kinds[int(rng.integers(len(kinds)))]
            for _ in range(int(rng.integers(1, 4)))
        ]
        digest_inputs = HashInput.from_source(*_synthesize_graph(rng, sample_id, opcount))
        manifests.append(
            SampleManifest(
                sample_id=sample_id,
                framework=spec.framework,
                task_category=category,
                operator_count=opcount,
                graph_hash=graph_hash(digest_inputs),
                dtypes=frozenset(output_kinds),
                parameter_count=parameter_count,
                source_digest_inputs=digest_inputs,
            )
        )

        eager = float(rng.lognormal(math.log(0.01), 0.5))
        warmup = int(rng.integers(1, 11))
        timed = int(rng.integers(10, 101))
        fate = float(rng.random())
        if fate < rates.compile_failure:
            records.append(
                RunRecord(
                    sample_id,
                    eager,
                    CompileFailure("synthetic compile failure"),
                    warmup_iters=warmup,
                    timed_iters=timed,
                )
            )
            continue
        if fate < rates.compile_failure + rates.runtime_crash:
            records.append(
                RunRecord(
                    sample_id,
                    eager,
                    RuntimeCrash("synthetic runtime crash"),
                    warmup_iters=warmup,
                    timed_iters=timed,
                )
            )
            continue
        wrong = fate < rates.compile_failure + rates.runtime_crash + rates.accuracy_violation
        speedup = 2.0 ** rng.normal(spec.speedup_law.log2_mean, spec.speedup_law.log2_stddev)
        comparisons = []
        for index, kind in enumerate(output_kinds):
            baseline = rng.uniform(0.5, 1.5, size=_OUTPUT_LEN)
            if wrong:
                # Shift beyond the level-0 bound (1 + |y|, |y| <= 1.5).
                candidate = baseline + 4.0 + float(rng.random())
            else:
                magnitude = spec.noise_law.get(kind, 0.0) * 10.0 ** float(
                    rng.uniform(-2.0, 2.0)
                )
                candidate = baseline + rng.uniform(-1.0, 1.0, size=_OUTPUT_LEN) * magnitude
            comparisons.append(compare_outputs(candidate, baseline, kind, cfg.grid_neg, index))
        records.append(
            RunRecord(
                sample_id,
                eager,
                Completed(tuple(comparisons)),
                compiled_time_s=eager / speedup,
                warmup_iters=warmup,
                timed_iters=timed,
            )
        )
    return manifests, records


def _synthesize_graph(
    rng: np.random.Generator, sample_id: str, opcount: int
) -> tuple[str, Topology]:
    depth = int(rng.integers(3, 9))
    nodes = []
    for k in range(depth):
        op = _OP_VOCAB[int(rng.integers(len(_OP_VOCAB)))]
        if op in _BINARY_OPS and k >= 2:
            inputs: tuple[int, ...] = (k - 1, k - 2)
        elif k >= 1:
            inputs = (k - 1,)
        else:
            inputs = ()
        nodes.append((op, inputs))
    lines = [f"# synthetic graph {sample_id}", f"def graph_{sample_id}(x0):"]
    for k, (op, inputs) in enumerate(nodes):
        args = ", ".join(f"x{j}" for j in inputs) or "x0"
        lines.append(f"    x{k + 1} = {op}({args})  # node {k}")
    lines.append(f"    return x{len(nodes)}")
    lines.append(f"# operators: {opcount}")
    return "\n".join(lines), tuple(nodes)
