"""Build Cartan schemes, look at their parameters, and run recognition.

    python3 demos/cartan_tour.py
"""

from collections import Counter

import numpy as np

from cohconf import ColoredGraph, cartan_scheme, criterion_report, recognize_cartan

for q in (4, 5, 7):
    for variant in ("sl2", "pgl2"):
        b = cartan_scheme(q, variant)
        x = b.scheme
        census = dict(sorted(Counter(x.valency).items()))
        print(f"q={q:2d} {variant:5s} n={x.n:3d} rank={x.rank:2d} k={b.k:2d} |H|={b.H.order:2d} valencies={census}")

# SL(2,q) with odd q acts through PSL(2,q): the stabilizer has order (q-1)/2,
# so the scheme has about twice as many relations, each half as large.

print()
b = cartan_scheme(7)
rep = criterion_report(b.scheme, points=[0, 1, 2])
print(f"q=7 sl2: c={rep.c} k={rep.k} 2c(k-1)<n: {rep.inequality_holds}, base number {rep.base_number.value}")

rng = np.random.default_rng(0)
perm = rng.permutation(b.n)
inv = np.argsort(perm)
hidden = ColoredGraph(b.scheme.colors[np.ix_(inv, inv)])
r = recognize_cartan(hidden)
print(f"relabeled q=7 graph: accepted={r.accepted} as {r.recognized_as}, |Aut|={r.group_order}, "
      f"|H|={r.H_order} |B|={r.B_order} |N|={r.N_order}")
