"""Mesoscopic recurrence networks for book-length texts."""

__version__ = "0.1.0"

from .concentric import (  # noqa: E402
    MeasureSummary,
    accessibility,
    backbone,
    concentric_levels,
    saw_distribution,
    summarize,
    symmetry,
)
from .corpus import OrganizedText, RawBook, organize, shuffle_paragraphs  # noqa: E402
from .mesonet import MesoNetwork, build_network  # noqa: E402
from .signature import recurrence_signature, rs_stats  # noqa: E402

__all__ = [
    "MeasureSummary",
    "MesoNetwork",
    "OrganizedText",
    "RawBook",
    "accessibility",
    "backbone",
    "build_network",
    "concentric_levels",
    "organize",
    "recurrence_signature",
    "rs_stats",
    "saw_distribution",
    "shuffle_paragraphs",
    "summarize",
    "symmetry",
]
