"""
From a book to a paragraph network
==================================

A book becomes a chain of paragraph nodes. Each node carries the tf-idf
vector of a small window of paragraphs around it, and the strongest
long-range similarities are added as extra edges.
"""

# %%
# Organize the text. The bundled Book of Job has one verse per paragraph.
from pathlib import Path

from textrecur.corpus import RawBook, organize

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus"
book = organize(RawBook.from_path(CORPUS / "kjv_job.txt"))
print(len(book), "paragraphs")
print(book.paragraphs[0].lemmas)

# %%
# Windows of radius 1 and their tf-idf vectors.
from textrecur.vectorize import similarity_matrix, window_vectors

vectors, model = window_vectors(book, delta=1)
print(len(model.vocabulary), "lemmas in the vocabulary")
sim = similarity_matrix(vectors)
print("cosine of windows 0 and 2:", round(sim[0, 2], 4))

# %%
# Keep about four similarity edges per node, then add the reading-order chain.
from textrecur.mesonet import build_network

net = build_network(book, delta=1, t=4.0)
print(len(net.similarity_edges), "similarity edges,", len(net.sequence_edges), "sequence edges")
print("strongest:", max(net.similarity_edges, key=lambda e: e.weight))

# %%
# The network is saved as a small TSV file with weights to 9 decimals.
from textrecur.mesonet import MesoNetwork

text = net.to_tsv()
print(text.splitlines()[:3])
assert MesoNetwork.from_tsv(text).to_tsv() == text
