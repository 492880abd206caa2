"""
Genre communities and a tf-idf baseline
=======================================

Genres that are often listed together on the same book end up in the same
community of the projected genre graph. Books are labelled by where most of
their genres fall.
"""

# %%
from textrecur.study import bipartite_project, detect_communities, label_book

books = {
    "moby_dick": ["adventure", "sea", "fiction"],
    "treasure_island": ["adventure", "pirates", "fiction"],
    "origin_of_species": ["science", "biology"],
    "voyage_of_the_beagle": ["science", "travel", "sea"],
    "kidnapped": ["adventure", "fiction"],
}
graph = bipartite_project(books.items())
partition = detect_communities(graph, seed=0)
print(partition)
# with no choice given the two largest communities count as fiction; here
# there are only two, so pick the one holding the "fiction" genre instead
fiction = {partition["fiction"]}
print({b: label_book(g, partition, fiction) for b, g in books.items()})

# %%
# Whole-book tf-idf vectors projected on their two main directions.
from pathlib import Path

from textrecur.corpus import RawBook, organize
from textrecur.study import book_tfidf_matrix, pca2

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus"
texts = [organize(RawBook.from_path(p)) for p in sorted(CORPUS.glob("kjv_*.txt"))]
pca = pca2(book_tfidf_matrix(texts))
for text, (x, y) in zip(texts, pca.points):
    print(f"{text.book_id:14s} {x:8.3f} {y:8.3f}")
