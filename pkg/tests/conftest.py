"""Shared fixtures: small hand-built graphs and organized texts."""

from __future__ import annotations

import networkx as nx
import pytest

from textrecur.corpus import FALLBACK, OrganizedText, Paragraph
from textrecur.mesonet import SIMILARITY, Edge, assemble

# similarity edges of the 15-node chain used for the recurrence-signature fixture
CHAIN15_SIMILARITY = [(1, 7), (2, 12), (5, 8)]
CHAIN15_INCIDENT = {1, 2, 5, 7, 8, 12}


def organized(lemma_lists, book_id="book") -> OrganizedText:
    paragraphs = tuple(
        Paragraph(i, tuple((lemma, FALLBACK) for lemma in lemmas)) for i, lemmas in enumerate(lemma_lists)
    )
    return OrganizedText(book_id, paragraphs)


def chain15_network():
    edges = [Edge(a, b, SIMILARITY, 0.5) for a, b in CHAIN15_SIMILARITY]
    return assemble(15, edges, delta=1, t=0.4)


@pytest.fixture
def chain15():
    return chain15_network()


@pytest.fixture
def c10():
    return nx.cycle_graph(10)


def random_connected_graph(rng, n_min=2, n_max=12, p=None):
    """Seeded connected G(n, p) sample, relabelled 0..n-1."""
    while True:
        n = rng.randint(n_min, n_max)
        prob = p if p is not None else rng.uniform(0.15, 0.7)
        g = nx.gnp_random_graph(n, prob, seed=rng.randrange(2**32))
        if nx.is_connected(g):
            return g
