"""Experiments on book collections.

* real vs paragraph-shuffled discrimination (standardized-centroid RMSE and
  a leave-one-out nearest-centroid check),
* genre labels from a book/genre bipartite projection and Louvain communities,
* correlation of recurrence-signature statistics with accessibility,
* a PCA baseline on whole-book tf-idf vectors.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np
from scipy import stats

from .corpus import OrganizedText, book_id_from_path, shuffle_paragraphs
from .pipeline import BookResult, RunConfig, log_timings, organize_path, process_organized, timed
from .vectorize import ParagraphWindow, fit_tfidf, to_csr, vectorize_window

log = logging.getLogger(__name__)

FEATURES = ("mean_k", "std_k", "mean_S", "rsMean", "rsStd")
REAL, SHUFFLED = "real", "shuffled"
FICTION, OTHERS = "fiction", "others"

RMSE_DEFINITION = (
    "features z-scored over the pooled records (population std); "
    "rmse = sqrt(mean over features of (centroid_a - centroid_b)^2)"
)


class UndefinedCorrelation(ValueError):
    pass


class PowerIterationError(RuntimeError):
    def __init__(self, component: int, iterations: int):
        super().__init__(f"component {component} did not converge after {iterations} iterations")
        self.component = component
        self.iterations = iterations


@dataclass
class FeatureRecord:
    book_id: str
    label: str
    features: dict[str, float]
    h: int = 2
    delta: int = 1
    t: float = 4.0

    @classmethod
    def from_result(cls, result: BookResult, label: str, h: int, config: RunConfig) -> "FeatureRecord":
        s = result.summaries[h]
        features = {
            "mean_k": s.mean_k,
            "std_k": s.std_k,
            "mean_S": s.mean_S,
            "rsMean": s.rs_mean,
            "rsStd": s.rs_std,
        }
        return cls(result.book_id, label, features, h, config.delta, config.avg_degree)


def _matrix(records: Sequence[FeatureRecord], names: Sequence[str]) -> np.ndarray:
    missing = {n for r in records for n in names if n not in r.features}
    if missing:
        raise KeyError(f"records lack features {sorted(missing)}")
    return np.array([[r.features[n] for n in names] for r in records], dtype=float)


def zero_variance_features(records: Sequence[FeatureRecord], names: Sequence[str]) -> list[str]:
    x = _matrix(records, names)
    return [n for n, sd in zip(names, x.std(axis=0)) if sd == 0]


def rmse_separation(
    group_a: Sequence[FeatureRecord], group_b: Sequence[FeatureRecord], names: Sequence[str]
) -> float:
    """Root mean squared distance between the two group centroids in z-score units.

    A feature with zero pooled variance contributes 0 (and is logged).
    """
    if not group_a or not group_b:
        raise ValueError("both groups must be non-empty")
    pooled = _matrix(list(group_a) + list(group_b), names)
    mu, sd = pooled.mean(axis=0), pooled.std(axis=0)
    flat = sd == 0
    if flat.any():
        log.warning("zero pooled variance in %s; contributing 0", [n for n, f in zip(names, flat) if f])
    z = np.divide(pooled - mu, sd, out=np.zeros_like(pooled), where=~flat)
    diff = z[: len(group_a)].mean(axis=0) - z[len(group_a):].mean(axis=0)
    return float(np.sqrt(np.mean(diff**2)))


def _check_series(x, y) -> tuple[np.ndarray, np.ndarray]:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("series must be 1-D and of equal length")
    if len(x) < 3:
        raise ValueError("need at least 3 points")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedCorrelation("correlation undefined for a constant series")
    return x, y


def pearson(x, y) -> float:
    x, y = _check_series(x, y)
    return float(np.clip(stats.pearsonr(x, y)[0], -1.0, 1.0))


def spearman(x, y) -> float:
    """Rank correlation; ties get average ranks."""
    x, y = _check_series(x, y)
    return float(np.clip(stats.spearmanr(x, y)[0], -1.0, 1.0))


def bipartite_project(books: Iterable[tuple[str, Sequence[str]]]) -> nx.Graph:
    """Genre co-membership graph: edge weight = number of books listing both genres."""
    g = nx.Graph()
    for _, genres in books:
        unique = sorted(set(genres))
        g.add_nodes_from(unique)
        for u, v in combinations(unique, 2):
            w = g.get_edge_data(u, v, {"weight": 0})["weight"]
            g.add_edge(u, v, weight=w + 1)
    if g.number_of_nodes() == 0:
        raise ValueError("no genres given")
    return g


def detect_communities(g: nx.Graph, seed: int = 0) -> dict[str, int]:
    """Louvain partition (weighted, resolution 1). Ids are ordered by community size, largest first."""
    if g.number_of_nodes() == 0:
        raise ValueError("empty genre graph")
    comms = nx.community.louvain_communities(g, weight="weight", resolution=1.0, seed=seed)
    comms = sorted((sorted(c) for c in comms), key=lambda c: (-len(c), c[0]))
    return {node: cid for cid, members in enumerate(comms) for node in members}


def modularity(g: nx.Graph, partition: Mapping[str, int]) -> float:
    groups: dict[int, set] = {}
    for node, cid in partition.items():
        groups.setdefault(cid, set()).add(node)
    return nx.community.modularity(g, groups.values(), weight="weight")


def default_fiction_communities(partition: Mapping[str, int]) -> set[int]:
    sizes = Counter(partition.values())
    return {cid for cid, _ in sorted(sizes.items(), key=lambda kv: (-kv[1], kv[0]))[:2]}


def label_book(genres: Sequence[str], partition: Mapping[str, int], fiction: set[int]) -> str:
    """``fiction`` iff strictly more than half of the book's known genres are in fiction communities."""
    known = [g for g in set(genres) if g in partition]
    if len(known) < len(set(genres)):
        log.warning("ignoring genres missing from the partition: %s", sorted(set(genres) - set(known)))
    hits = sum(partition[g] in fiction for g in known)
    return FICTION if known and 2 * hits > len(known) else OTHERS


@dataclass
class PCAResult:
    points: np.ndarray
    components: np.ndarray
    variances: np.ndarray
    iterations: list[int] = field(default_factory=list)


def pca2(data, tol: float = 1e-9, max_iter: int = 10_000, seed: int = 0) -> PCAResult:
    """Project mean-centred rows onto the top two principal directions.

    Directions come from power iteration with Hotelling deflation on the
    (implicit) covariance operator, re-orthogonalising every step. Each
    direction is signed so that its largest-magnitude loading is positive.
    """
    if hasattr(data, "toarray"):
        data = data.toarray()
    if isinstance(data, (list, tuple)) and data and isinstance(data[0], FeatureRecord):
        data = _matrix(data, [n for n in FEATURES if n in data[0].features])
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[0] < 3 or x.shape[1] < 2:
        raise ValueError("need at least 3 records of dimension >= 2")
    xc = x - x.mean(axis=0)
    n, d = xc.shape

    def deflated_cov(v):
        w = xc.T @ (xc @ v) / n
        for u, lam in zip(comps, lams):
            w -= lam * (u @ v) * u
        return w

    scale = float(np.sum(xc * xc)) / n  # trace of the covariance
    rng = np.random.default_rng(seed)
    comps: list[np.ndarray] = []
    lams: list[float] = []
    iters: list[int] = []
    for c in range(2):
        v = _orthonormalize(rng.standard_normal(d), comps)
        for it in range(1, max_iter + 1):
            w = deflated_cov(v)
            if np.linalg.norm(w) <= 1e-12 * scale:
                break  # nothing left to explain: v carries zero variance
            w = _orthonormalize(w, comps)
            if w @ v < 0:
                w = -w
            done = np.linalg.norm(w - v) < tol
            v = w
            if done:
                break
        else:
            raise PowerIterationError(c, max_iter)
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        comps.append(v)
        lams.append(float(v @ deflated_cov(v)))
        iters.append(it)
    components = np.vstack(comps)
    points = xc @ components.T
    return PCAResult(points, components, points.var(axis=0), iters)


def _orthonormalize(v: np.ndarray, basis: Sequence[np.ndarray]) -> np.ndarray:
    for u in basis:
        v = v - (u @ v) * u
    return v / np.linalg.norm(v)


def loo_nearest_centroid_accuracy(records: Sequence[FeatureRecord], names: Sequence[str]) -> float:
    """Leave-one-out accuracy of a nearest-centroid classifier on z-scored features.

    Scaling uses the training fold only.
    """
    x = _matrix(records, names)
    labels = np.array([r.label for r in records])
    correct = 0
    for j in range(len(records)):
        train = np.arange(len(records)) != j
        mu, sd = x[train].mean(axis=0), x[train].std(axis=0)
        sd[sd == 0] = 1.0
        z = (x - mu) / sd
        classes = sorted(set(labels[train]))
        centroids = np.array([z[train & (labels == c)].mean(axis=0) for c in classes])
        pred = classes[int(np.argmin(np.linalg.norm(centroids - z[j], axis=1)))]
        correct += pred == labels[j]
    return correct / len(records)


def shuffle_seeds(book_ids: Sequence[str], seed: int) -> dict[str, int]:
    """One shuffle seed per book, drawn from a single generator in sorted book-id order."""
    rng = random.Random(seed)
    return {b: rng.getrandbits(63) for b in sorted(book_ids)}


def _run_pair(args) -> tuple[BookResult, BookResult]:
    path, config, shuffle_seed = args
    timings: dict[str, float] = {}
    with timed(timings, "text_processing"):
        organized = organize_path(path, config)
    real = process_organized(organized, config, timings)
    log_timings(real.book_id, timings)
    timings = {}
    with timed(timings, "text_processing"):
        shuffled_text = shuffle_paragraphs(organized, shuffle_seed)
    shuffled = process_organized(shuffled_text, config, timings)
    log_timings(f"{real.book_id}[shuffled]", timings)
    return real, shuffled


def run_real_vs_shuffled(
    paths: Sequence[str | Path], config: RunConfig, jobs: int = 1
) -> list[tuple[BookResult, BookResult]]:
    """Build and measure every book and one seeded shuffled variant of it."""
    seeds = shuffle_seeds([book_id_from_path(p) for p in paths], config.seed)
    tasks = [(p, config, seeds[book_id_from_path(p)]) for p in paths]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_pair, tasks))
    return [_run_pair(t) for t in tasks]


def correlation_report(records: Sequence[FeatureRecord]) -> dict[str, dict[str, float]]:
    """Pearson and Spearman for (rsMean, mean_k) and (rsStd, std_k)."""
    x = _matrix(records, ["rsMean", "mean_k", "rsStd", "std_k"])
    return {
        "rsMean_vs_mean_k": {"pearson": pearson(x[:, 0], x[:, 1]), "spearman": spearman(x[:, 0], x[:, 1])},
        "rsStd_vs_std_k": {"pearson": pearson(x[:, 2], x[:, 3]), "spearman": spearman(x[:, 2], x[:, 3])},
    }


def book_tfidf_matrix(texts: Sequence[OrganizedText]):
    """Whole-book tf-idf vectors (one document per book), as a sparse matrix."""
    docs = [
        ParagraphWindow(i, 0, dict(Counter(lemma for p in o.paragraphs for lemma in p.lemmas)))
        for i, o in enumerate(texts)
    ]
    model = fit_tfidf(docs)
    return to_csr([vectorize_window(d, model) for d in docs], len(model.vocabulary))
