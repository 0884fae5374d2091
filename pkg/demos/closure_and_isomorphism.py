"""Coherent closure of a small graph, its automorphisms, and an isomorphism test.

    python3 demos/closure_and_isomorphism.py
"""

import numpy as np

from cohconf import ColoredGraph, aut_group, indistinguishing_numbers, iso_graphs, point_extension, wl_closure
from cohconf.core import cycle_graph, regular_points

# The 5-cycle closes to the rank-3 scheme of the dihedral group of order 10.
x, trace = wl_closure(cycle_graph(5))
print("5-cycle closure: rank", x.rank, "after", trace.rounds, "rounds")
print(x.colors)
print("|Aut| =", aut_group(x).order, " c(X) =", indistinguishing_numbers(x).c)

# Fixing one point splits the rest into two fibers of size 2; the points of
# those fibers are regular, so the extension is 1-regular.
e = point_extension(x, [0])
print("fibers after fixing 0:", e.fibers, " regular points:", regular_points(e))

# The Petersen graph against a relabeled copy of itself.
outer = [(i, (i + 1) % 5) for i in range(5)]
inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
spokes = [(i, i + 5) for i in range(5)]
a = np.full((10, 10), 2)
for i, j in outer + inner + spokes:
    a[i, j] = a[j, i] = 1
np.fill_diagonal(a, 0)
perm = np.random.default_rng(1).permutation(10)
b = a[np.ix_(np.argsort(perm), np.argsort(perm))]

res = iso_graphs(ColoredGraph(a), ColoredGraph(b))
print("Petersen vs relabeled copy:", len(res.isomorphisms), "isomorphisms")
