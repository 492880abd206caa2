"""End-to-end processing of one book, with per-stage timings.

The three timing buckets are ``text_processing`` (clean, segment, tokenize),
``network_modelling`` (windows, tf-idf, similarities, pruning) and
``characterization`` (accessibility, symmetry, recurrence signature).
"""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .concentric import MeasureSummary, node_measures
from .corpus import (
    DEFAULT_CHAPTER_REGEX,
    OrganizedText,
    RawBook,
    load_sidecar,
    organize,
    shuffle_paragraphs,
    sidecar_path,
)
from .mesonet import MesoNetwork, build_network
from .signature import RecurrenceSignature, recurrence_signature, rs_stats

log = logging.getLogger(__name__)

STAGES = ("text_processing", "network_modelling", "characterization")


@dataclass(frozen=True)
class RunConfig:
    delta: int = 1
    avg_degree: float = 4.0
    depths: tuple[int, ...] = (2,)
    seed: int = 0
    chapter_regex: str = DEFAULT_CHAPTER_REGEX
    stopwords: frozenset[str] | None = None

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be >= 1")
        if self.avg_degree <= 0:
            raise ValueError("avg_degree must be > 0")
        if not self.depths or min(self.depths) < 1:
            raise ValueError("depths must be >= 1")

    def meta(self, **extra) -> dict:
        out = {"delta": self.delta, "t": f"{self.avg_degree:g}"}
        out.update(extra)
        out.update({"seed": self.seed, "version": __version__})
        return out


@dataclass
class BookResult:
    book_id: str
    organized: OrganizedText
    network: MesoNetwork
    signature: RecurrenceSignature
    summaries: dict[int, MeasureSummary]
    node_values: dict[int, tuple] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)


@contextmanager
def timed(timings: dict[str, float], stage: str):
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = timings.get(stage, 0.0) + time.perf_counter() - start


def organize_path(path: str | Path, config: RunConfig) -> OrganizedText:
    """Raw text file -> organized text, picking up ``<book>.annotations.jsonl`` if present."""
    path = Path(path)
    raw = RawBook.from_path(path)
    sidecar = sidecar_path(path)
    annotations = load_sidecar(sidecar) if sidecar.exists() else None
    return organize(raw, annotations, config.chapter_regex, config.stopwords)


def characterize(
    network: MesoNetwork, depths: Sequence[int], book_id: str = ""
) -> tuple[RecurrenceSignature, dict[int, MeasureSummary], dict[int, tuple]]:
    rs = recurrence_signature(network, book_id)
    rs_mean, rs_std, empty = rs_stats(rs)
    summaries, values = {}, {}
    for h in depths:
        k, s = node_measures(network, h)
        values[h] = (k, s)
        summaries[h] = MeasureSummary(
            book_id, h, float(np.mean(k)), float(np.std(k)), float(np.mean(s)), rs_mean, rs_std, empty
        )
    return rs, summaries, values


def process_organized(
    organized: OrganizedText, config: RunConfig, timings: dict[str, float] | None = None
) -> BookResult:
    timings = {} if timings is None else timings
    with timed(timings, "network_modelling"):
        network = build_network(organized, config.delta, config.avg_degree)
    with timed(timings, "characterization"):
        rs, summaries, values = characterize(network, config.depths, organized.book_id)
    return BookResult(organized.book_id, organized, network, rs, summaries, values, timings)


def process_book(
    source: str | Path | RawBook, config: RunConfig, shuffle_seed: int | None = None
) -> BookResult:
    """Run text processing, network modelling and characterization on one book."""
    timings: dict[str, float] = {}
    with timed(timings, "text_processing"):
        if isinstance(source, RawBook):
            organized = organize(source, None, config.chapter_regex, config.stopwords)
        else:
            organized = organize_path(source, config)
        if shuffle_seed is not None:
            organized = shuffle_paragraphs(organized, shuffle_seed)
    result = process_organized(organized, config, timings)
    log_timings(result.book_id, timings)
    return result


def log_timings(book_id: str, timings: dict[str, float]) -> None:
    parts = " ".join(f"{stage}={timings.get(stage, 0.0):.3f}s" for stage in STAGES)
    log.info("%s: %s total=%.3fs", book_id, parts, sum(timings.values()))
