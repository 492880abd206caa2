"""
The recurrence signature
========================

Walk along the paragraphs in reading order. Every time a node touches a
similarity edge, write down how many steps it has been since the last one.
"""

# %%
from textrecur.mesonet import SIMILARITY, Edge, assemble
from textrecur.signature import recurrence_signature, rs_stats

# %%
# Fifteen paragraphs. Three long-range links touch nodes 1, 2, 5, 7, 8 and 12.
links = [Edge(1, 7, SIMILARITY, 0.5), Edge(2, 12, SIMILARITY, 0.5), Edge(5, 8, SIMILARITY, 0.5)]
net = assemble(15, links, delta=1, t=0.4)
rs = recurrence_signature(net, "toy")
print(rs.gaps)  # (1, 1, 3, 2, 1, 4)
print("mean, std, empty:", rs_stats(rs))

# %%
# Shuffling paragraphs spreads the similar passages around, which changes
# the spacing of recurrences on a real book.
from pathlib import Path

from textrecur.pipeline import RunConfig, process_book

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus"
config = RunConfig(depths=(2,))
real = process_book(CORPUS / "kjv_job.txt", config)
shuffled = process_book(CORPUS / "kjv_job.txt", config, shuffle_seed=1)
print("real    :", rs_stats(real.signature))
print("shuffled:", rs_stats(shuffled.signature))
