"""Canonical graph hashing for dataset deduplication.

A graph is identified by its source text (after a fixed normalization)
together with its operator topology. Hashing the canonical byte encoding
of the pair gives a digest that is stable across producers, so duplicate
graphs can be detected without re-executing anything.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from typing import Iterable

__all__ = ["HashInput", "Topology", "graph_hash", "normalize_source"]

Topology = tuple[tuple[str, tuple[int, ...]], ...]

_COMMENT = re.compile(r"#[^\n]*")
_WHITESPACE = re.compile(r"\s+")


def normalize_source(text: str) -> str:
    """Canonicalize source text: drop '#' comments, collapse whitespace.

    Every '#' starts a comment running to the end of its line; runs of
    whitespace (including newlines) collapse to a single space and the
    ends are trimmed. Identifier names are kept as written. The result is
    a fixed point: normalize(normalize(s)) == normalize(s).
    """
    return _WHITESPACE.sub(" ", _COMMENT.sub("", text)).strip()


def _freeze_topology(topology: Iterable) -> Topology:
    frozen = []
    for entry in topology:
        try:
            op, inputs = entry
            frozen.append((str(op), tuple(int(i) for i in inputs)))
        except (TypeError, ValueError) as exc:
            raise ValueError(
                "topology entries must be (op_type, input indices) pairs"
            ) from exc
    return tuple(frozen)


@dataclass(frozen=True)
class HashInput:
    """Canonical hashing inputs for one computational graph.

    ``normalized_source`` must already be in normalized form (build via
    ``from_source`` to guarantee that); ``topology`` lists operators in
    topological order as (op_type, ordered input indices) pairs.
    """

    normalized_source: str
    topology: Topology

    @classmethod
    def from_source(cls, source: str, topology: Iterable) -> "HashInput":
        """Normalize raw source text and freeze the topology listing."""
        return cls(normalize_source(source), _freeze_topology(topology))


def graph_hash(h: HashInput) -> str:
    """Hex digest of the canonical byte encoding of a graph.

    SHA-256 over the normalized source, a 0x1f separator, and the compact
    JSON form of the topology. Normalization is idempotent, so it is
    applied again here defensively; equal graphs hash equally no matter
    how the input was constructed.
    """
    if not h.topology:
        raise ValueError("topology must be nonempty")
    source = normalize_source(h.normalized_source)
    topology = json.dumps(
        [[op, list(inputs)] for op, inputs in h.topology],
        separators=(",", ":"),
    )
    payload = source.encode("utf-8") + b"\x1f" + topology.encode("utf-8")
    return hashlib.sha256(payload).hexdigest()
