"""Paragraph windows, tf-idf weighting and cosine similarity.

Weighting: raw-count tf and smoothed idf ``ln((1 + N) / (1 + df)) + 1``, with
no normalization inside the model (cosine does that).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import DegenerateInputError, OrganizedText


@dataclass(frozen=True)
class ParagraphWindow:
    center: int
    delta: int
    token_counts: dict[str, int]


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    doc_freq: dict[str, int]
    n_docs: int

    def idf(self, lemma: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.doc_freq[lemma])) + 1.0


@dataclass(frozen=True)
class SparseVector:
    indices: tuple[int, ...] = ()
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if any(w == 0 for w in self.weights):
            raise ValueError("explicit zeros are not allowed")

    @classmethod
    def from_dict(cls, entries: dict[int, float]) -> "SparseVector":
        items = sorted((i, w) for i, w in entries.items() if w != 0)
        return cls(tuple(i for i, _ in items), tuple(float(w) for _, w in items))

    def norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.weights))


def build_windows(o: OrganizedText, delta: int) -> list[ParagraphWindow]:
    """One window per paragraph, aggregating paragraphs ``i - delta .. i + delta`` (clamped)."""
    if delta < 1:
        raise ValueError("delta must be >= 1")
    n = len(o)
    if n <= 2 * delta + 1:
        raise DegenerateInputError(
            f"{o.book_id}: {n} paragraphs is too few for delta={delta} (need > {2 * delta + 1})"
        )
    per_par = [Counter(p.lemmas) for p in o.paragraphs]
    windows = []
    for i in range(n):
        counts: Counter[str] = Counter()
        for j in range(max(0, i - delta), min(n - 1, i + delta) + 1):
            counts.update(per_par[j])
        windows.append(ParagraphWindow(i, delta, dict(counts)))
    return windows


def fit_tfidf(windows: Sequence[ParagraphWindow]) -> TfIdfModel:
    doc_freq: Counter[str] = Counter()
    for w in windows:
        doc_freq.update(w.token_counts.keys())
    if not doc_freq:
        raise DegenerateInputError("empty vocabulary: no window contains a token")
    vocabulary = {lemma: idx for idx, lemma in enumerate(sorted(doc_freq))}
    return TfIdfModel(vocabulary, dict(doc_freq), len(windows))


def vectorize_window(w: ParagraphWindow, m: TfIdfModel) -> SparseVector:
    entries = {
        m.vocabulary[lemma]: count * m.idf(lemma)
        for lemma, count in w.token_counts.items()
        if lemma in m.vocabulary
    }
    return SparseVector.from_dict(entries)


def cosine(u: SparseVector, v: SparseVector) -> float:
    """Cosine similarity; 0 when either vector is zero."""
    su = math.fsum(w * w for w in u.weights)
    sv = math.fsum(w * w for w in v.weights)
    if su == 0 or sv == 0:
        return 0.0
    wv = dict(zip(v.indices, v.weights))
    dot = math.fsum(w * wv[i] for i, w in zip(u.indices, u.weights) if i in wv)
    # sqrt(x * x) == x in IEEE arithmetic, so cosine(u, u) is exactly 1
    return min(1.0, max(0.0, dot / math.sqrt(su * sv)))


def to_csr(vectors: Sequence[SparseVector], dim: int | None = None) -> sp.csr_matrix:
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(v.indices) for v in vectors])
    indices = np.fromiter((i for v in vectors for i in v.indices), dtype=np.int64, count=indptr[-1])
    data = np.fromiter((w for v in vectors for w in v.weights), dtype=float, count=indptr[-1])
    if dim is None:
        dim = int(indices.max()) + 1 if indices.size else 1
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def similarity_matrix(vectors: Sequence[SparseVector], dim: int | None = None) -> np.ndarray:
    """Dense all-pairs cosine matrix. Zero vectors get all-zero rows and columns."""
    x = to_csr(vectors, dim)
    gram = (x @ x.T).toarray()
    sq = np.diag(gram).copy()
    denom = np.sqrt(np.outer(sq, sq))
    sim = np.divide(gram, denom, out=np.zeros_like(gram), where=denom > 0)
    np.clip(sim, 0.0, 1.0, out=sim)
    return sim


def window_vectors(o: OrganizedText, delta: int) -> tuple[list[SparseVector], TfIdfModel]:
    windows = build_windows(o, delta)
    model = fit_tfidf(windows)
    return [vectorize_window(w, model) for w in windows], model


def write_similarity_csv(sim: np.ndarray, path) -> None:
    """Debug dump: square matrix, node indices as row/column labels, 9 decimals."""
    n = sim.shape[0]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("node," + ",".join(str(j) for j in range(n)) + "\n")
        for i in range(n):
            fh.write(f"{i}," + ",".join(f"{x:.9f}" for x in sim[i]) + "\n")
