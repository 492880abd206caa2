"""Recurrence signature: gaps between similarity-edge-bearing nodes in reading order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .mesonet import MesoNetwork


@dataclass(frozen=True)
class RecurrenceSignature:
    book_id: str
    gaps: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.gaps)


def signature_from_incidence(incident: Sequence[bool]) -> list[int]:
    counter = 0
    gaps = []
    for flag in incident:
        if flag:
            gaps.append(counter)
            counter = 0
        counter += 1
    return gaps


def recurrence_signature(g: MesoNetwork, book_id: str = "") -> RecurrenceSignature:
    """Walk the nodes in index order; at every node touched by a similarity
    edge, emit the number of steps since the previous such node.

    The counter is checked before it is incremented and whatever is left
    after the last node is dropped. Edge length and direction do not matter,
    and sequence edges never count.
    """
    return RecurrenceSignature(book_id, tuple(signature_from_incidence(g.similarity_incident())))


def rs_stats(rs: RecurrenceSignature | Sequence[int]) -> tuple[float, float, bool]:
    """``(mean, population std, empty)``; an empty signature gives ``(0, 0, True)``."""
    gaps = rs.gaps if isinstance(rs, RecurrenceSignature) else tuple(rs)
    if not gaps:
        return 0.0, 0.0, True
    arr = np.asarray(gaps, dtype=float)
    return float(arr.mean()), float(arr.std()), False


def rs_csv(rs: RecurrenceSignature, meta: dict | None = None) -> str:
    lines = []
    if meta:
        lines.append("# " + " ".join(f"{k}={v}" for k, v in meta.items()))
    lines.append("gap")
    lines.extend(str(g) for g in rs.gaps)
    return "\n".join(lines) + "\n"
