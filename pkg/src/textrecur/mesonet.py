"""Mesoscopic network assembly.

Nodes are paragraph windows. Similarity edges join windows that do not
overlap (``|a - b| > delta``) and survive pruning to a target average degree;
sequence edges chain consecutive paragraphs so the graph is always connected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .corpus import OrganizedText
from .vectorize import SparseVector, similarity_matrix, window_vectors

SIMILARITY = "similarity"
SEQUENCE = "sequence"


class NetworkFormatError(ValueError):
    """A ``.mesonet.tsv`` file could not be parsed."""


class Edge(NamedTuple):
    a: int
    b: int
    kind: str
    weight: float | None = None


class CandidateEdges(NamedTuple):
    """Parallel arrays, one entry per unordered pair with ``a < b``."""

    a: np.ndarray
    b: np.ndarray
    weight: np.ndarray

    def __len__(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class MesoNetwork:
    n: int
    edges: tuple[Edge, ...]
    delta: int
    t: float

    @property
    def similarity_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.kind == SIMILARITY]

    @property
    def sequence_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.kind == SEQUENCE]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for e in self.edges:
            adj[e.a].append(e.b)
            adj[e.b].append(e.a)
        for nbrs in adj:
            nbrs.sort()
        return adj

    def similarity_incident(self) -> list[bool]:
        flags = [False] * self.n
        for e in self.similarity_edges:
            flags[e.a] = flags[e.b] = True
        return flags

    def to_tsv(self, meta: dict | None = None) -> str:
        header = f"# n={self.n} delta={self.delta} t={self.t:g}"
        for key, value in (meta or {}).items():
            header += f" {key}={value}"
        lines = [header]
        for e in self.edges:
            w = "-" if e.weight is None else f"{e.weight:.9f}"
            lines.append(f"{e.a}\t{e.b}\t{e.kind}\t{w}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str, source: str = "<string>") -> "MesoNetwork":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise NetworkFormatError(f"{source}:1: missing '# n=... delta=... t=...' header")
        try:
            fields = dict(tok.split("=", 1) for tok in lines[0][1:].split())
            n, delta, t = int(fields["n"]), int(fields["delta"]), float(fields["t"])
        except (ValueError, KeyError) as exc:
            raise NetworkFormatError(f"{source}:1: bad header {lines[0]!r}") from exc
        edges = []
        for lineno, line in enumerate(lines[1:], 2):
            if not line.strip():
                continue
            parts = line.split("\t")
            try:
                if len(parts) != 4 or parts[2] not in (SIMILARITY, SEQUENCE):
                    raise ValueError(line)
                a, b = int(parts[0]), int(parts[1])
                if not (0 <= a < n and 0 <= b < n) or a == b:
                    raise ValueError(f"bad endpoints {a}, {b}")
                weight = None if parts[3] == "-" else float(parts[3])
                if (weight is None) != (parts[2] == SEQUENCE):
                    raise ValueError("weight must be '-' exactly for sequence edges")
            except ValueError as exc:
                raise NetworkFormatError(f"{source}:{lineno}: malformed edge line: {exc}") from exc
            edges.append(Edge(a, b, parts[2], weight))
        return cls(n, tuple(edges), delta, t)


def candidate_pairs(n: int, delta: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.triu_indices(n, k=delta + 1)
    return a.astype(np.int64), b.astype(np.int64)


def candidate_edges(vectors: Sequence[SparseVector], delta: int) -> CandidateEdges:
    """All pairs ``a < b`` with ``b - a > delta``, weighted by cosine similarity.

    Zero-similarity pairs are kept; they simply lose every pruning tie.
    """
    a, b = candidate_pairs(len(vectors), delta)
    if len(a) == 0:
        return CandidateEdges(a, b, np.zeros(0))
    sim = similarity_matrix(vectors)
    return CandidateEdges(a, b, sim[a, b])


def edge_budget(n: int, t: float) -> int:
    # rounding first keeps e.g. 15 * 0.4 / 2 from ceiling to 4
    return math.ceil(round(n * t / 2, 9))


def prune_to_average_degree(candidates: CandidateEdges, n: int, t: float) -> list[Edge]:
    """Keep the ``ceil(n * t / 2)`` strongest candidates.

    Order is by descending weight, then smaller ``a``, then smaller ``b``.
    """
    if t <= 0:
        raise ValueError("average degree t must be > 0")
    k = min(edge_budget(n, t), len(candidates))
    order = np.lexsort((candidates.b, candidates.a, -candidates.weight))[:k]
    order = order[np.lexsort((candidates.b[order], candidates.a[order]))]
    return [
        Edge(int(candidates.a[j]), int(candidates.b[j]), SIMILARITY, float(candidates.weight[j]))
        for j in order
    ]


def assemble(n: int, similarity: Sequence[Edge], delta: int, t: float) -> MesoNetwork:
    sequence = [Edge(i, i + 1, SEQUENCE) for i in range(n - 1)]
    return MesoNetwork(n, tuple(sorted(similarity)) + tuple(sequence), delta, t)


def build_network(o: OrganizedText, delta: int = 1, t: float = 4.0) -> MesoNetwork:
    if t <= 0:
        raise ValueError("average degree t must be > 0")
    vectors, _ = window_vectors(o, delta)
    similarity = prune_to_average_degree(candidate_edges(vectors, delta), len(o), t)
    return assemble(len(o), similarity, delta, t)
