"""Concentric levels, accessibility and backbone symmetry.

All measures treat the network as simple, undirected and unweighted. Walk
probabilities are kept as exact fractions: every walk probability is a
product of ``1/choices`` factors, so the distributions are rational and
oracle comparisons are not limited by accumulated rounding.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .mesonet import MesoNetwork

Adjacency = Sequence[Sequence[int]]


def as_adjacency(g) -> list[list[int]]:
    """Neighbour lists indexed ``0..n-1``.

    Accepts a :class:`MesoNetwork`, a networkx graph whose nodes are
    ``0..n-1``, or a sequence of neighbour sequences.
    """
    if isinstance(g, MesoNetwork):
        return g.adjacency()
    if hasattr(g, "adj") and hasattr(g, "number_of_nodes"):
        n = g.number_of_nodes()
        if set(g.nodes) != set(range(n)):
            raise ValueError("graph nodes must be labelled 0..n-1")
        return [sorted(v for v in g.adj[u] if v != u) for u in range(n)]
    return [list(nbrs) for nbrs in g]


@dataclass(frozen=True)
class ConcentricLevels:
    source: int
    levels: tuple[frozenset[int], ...]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def distance(self) -> dict[int, int]:
        return {v: r for r, shell in enumerate(self.levels) for v in shell}


@dataclass(frozen=True)
class WalkDistribution:
    source: int
    depth: int
    probs: dict[int, Fraction]

    @property
    def mass(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))


@dataclass(frozen=True)
class BackbonePattern:
    source: int
    levels: tuple[frozenset[int], ...]
    children: dict[int, tuple[int, ...]]
    dead_ends: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u, vs in self.children.items() for v in vs)


@dataclass
class MeasureSummary:
    book_id: str
    h: int
    mean_k: float
    std_k: float
    mean_S: float
    rs_mean: float = 0.0
    rs_std: float = 0.0
    rs_empty: bool = False


def _check(adj: Adjacency, i: int, h: int) -> None:
    if not 0 <= i < len(adj):
        raise IndexError(f"node {i} not in graph of {len(adj)} nodes")
    if h < 1:
        raise ValueError("concentric depth h must be >= 1")


def _shells(adj: Adjacency, i: int, h: int) -> tuple[frozenset[int], ...]:
    dist = {i: 0}
    shells = [[i]]
    for r in range(h):
        nxt = []
        for u in shells[r]:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = r + 1
                    nxt.append(v)
        shells.append(nxt)
    return tuple(frozenset(s) for s in shells)


def concentric_levels(g, i: int, h: int) -> ConcentricLevels:
    """Breadth-first shells ``levels[0..h]`` around ``i``; empty shells are kept."""
    adj = as_adjacency(g)
    _check(adj, i, h)
    return ConcentricLevels(i, _shells(adj, i, h))


def _saw(adj: Adjacency, i: int, h: int, target: frozenset[int]) -> dict[int, Fraction]:
    denominators: dict[int, list[int]] = defaultdict(list)
    visited = {i}

    def expand(u: int, depth: int, denom: int) -> None:
        if depth == h:
            if u in target:
                denominators[u].append(denom)
            return
        options = [v for v in adj[u] if v not in visited]
        for v in options:
            visited.add(v)
            expand(v, depth + 1, denom * len(options))
            visited.discard(v)

    if target:
        expand(i, 0, 1)
    return {
        j: sum((Fraction(1, d) for d in ds), Fraction(0))
        for j, ds in sorted(denominators.items())
    }


def saw_distribution(g, i: int, h: int) -> WalkDistribution:
    """Arrival probabilities of ``h``-step self-avoiding walks from ``i`` on level ``h``.

    Each step is uniform over unvisited neighbours. Walks that get stuck, or
    that end on a node closer than ``h``, carry mass that is simply lost:
    the result is not renormalized.
    """
    adj = as_adjacency(g)
    _check(adj, i, h)
    shells = _shells(adj, i, h)
    return WalkDistribution(i, h, _saw(adj, i, h, shells[h]))


def entropy_exponential(probs: Iterable[Fraction | float]) -> float:
    """``exp(-sum p log p)`` with ``0 log 0 = 0``; 1 for an empty distribution."""
    atoms = [p for p in probs if p > 0]
    if not atoms:
        return 1.0
    if len(set(atoms)) == 1 and sum(atoms) == 1:
        # uniform law over m atoms: exactly m, no exp/log round trip
        return float(len(atoms))
    return math.exp(-math.fsum(float(p) * math.log(p) for p in atoms))


def accessibility(g, i: int, h: int, renormalize: bool = False) -> float:
    """Effective number of level-``h`` nodes reached by self-avoiding walks from ``i``.

    Parameters
    ----------
    renormalize : bool
        Rescale the arrival probabilities to sum to 1 before taking the
        entropy. Off by default; provided for sensitivity checks only.
    """
    probs = saw_distribution(g, i, h).probs
    if renormalize and probs:
        mass = sum(probs.values(), Fraction(0))
        probs = {j: p / mass for j, p in probs.items()}
    return entropy_exponential(probs.values())


def _backbone(adj: Adjacency, i: int, h: int) -> BackbonePattern:
    shells = _shells(adj, i, h)
    dist = {v: r for r, shell in enumerate(shells) for v in shell}
    children = {}
    dead = [0] * h
    for r in range(h):
        for u in sorted(shells[r]):
            ch = tuple(sorted(v for v in adj[u] if dist.get(v) == r + 1))
            children[u] = ch
            if not ch:
                dead[r] += 1
    return BackbonePattern(i, shells, children, tuple(dead))


def backbone(g, i: int, h: int) -> BackbonePattern:
    """Radius-``h`` ball around ``i`` minus intra-level edges.

    ``dead_ends[r]`` counts level-``r`` nodes (``r < h``) with no edge to level ``r + 1``.
    """
    adj = as_adjacency(g)
    _check(adj, i, h)
    return _backbone(adj, i, h)


def backbone_distribution(pattern: BackbonePattern) -> dict[int, Fraction]:
    """Outward walk on the backbone; dead ends absorb whatever reaches them."""
    current = {pattern.source: Fraction(1)}
    for _ in range(pattern.depth):
        nxt: dict[int, Fraction] = defaultdict(Fraction)
        for u, p in current.items():
            ch = pattern.children[u]
            for v in ch:
                nxt[v] += p / len(ch)
        current = nxt
    return dict(sorted(current.items()))


def _symmetry(pattern: BackbonePattern) -> float:
    arrivals = backbone_distribution(pattern)
    if not arrivals:
        return 0.0
    denom = len(pattern.levels[-1]) + sum(pattern.dead_ends)
    return entropy_exponential(arrivals.values()) / denom


def symmetry(g, i: int, h: int) -> float:
    """Backbone concentric symmetry of ``i`` at level ``h``, in ``[0, 1]``."""
    adj = as_adjacency(g)
    _check(adj, i, h)
    return _symmetry(_backbone(adj, i, h))


def node_measures(g, h: int) -> tuple[np.ndarray, np.ndarray]:
    """Accessibility and backbone symmetry of every node at depth ``h``."""
    adj = as_adjacency(g)
    n = len(adj)
    k = np.empty(n)
    s = np.empty(n)
    for i in range(n):
        _check(adj, i, h)
        pattern = _backbone(adj, i, h)
        k[i] = entropy_exponential(_saw(adj, i, h, pattern.levels[h]).values())
        s[i] = _symmetry(pattern)
    return k, s


def summarize(g, h: int, book_id: str = "") -> MeasureSummary:
    """Mean and population std of accessibility, mean of symmetry, over all nodes."""
    k, s = node_measures(g, h)
    return MeasureSummary(book_id, h, float(np.mean(k)), float(np.std(k)), float(np.mean(s)))
