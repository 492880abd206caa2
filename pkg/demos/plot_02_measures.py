"""
Accessibility and backbone symmetry
===================================

Both measures look at the ring of nodes exactly ``h`` steps away. The
accessibility counts how many of them a self-avoiding walk effectively
reaches. The symmetry asks how evenly an outward walk on the backbone
spreads over them.
"""

# %%
import networkx as nx

from textrecur.concentric import (
    accessibility,
    backbone,
    concentric_levels,
    saw_distribution,
    symmetry,
)

# %%
# On a cycle every node sees two nodes at distance 2, each reached with
# probability 1/2.
ring = nx.cycle_graph(10)
print(concentric_levels(ring, 0, 2).levels)
print(saw_distribution(ring, 0, 2).probs)
print("k =", accessibility(ring, 0, 2), " S =", symmetry(ring, 0, 2))

# %%
# At h = 1 the accessibility is just the degree.
g = nx.karate_club_graph()
print(all(accessibility(g, i, 1) == g.degree(i) for i in g))

# %%
# A node whose only edges run sideways is a dead end on the backbone. It
# swallows the walkers that reach it and lowers the symmetry.
g = nx.Graph([(0, 1), (0, 2), (1, 2), (1, 3), (1, 4)])
bb = backbone(g, 0, 2)
print("backbone edges:", bb.edges, "dead ends per level:", bb.dead_ends)
print("S =", symmetry(g, 0, 2))
