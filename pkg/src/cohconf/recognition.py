"""Isomorphisms of coherent configurations and recognition of Cartan schemes.

Isomorphisms are listed by individualization-refinement: pick a point of the
first smallest non-singleton fiber on the left, try every point of the
matching fiber on the right, refine both sides in lockstep and recurse.  Each
complete (discrete) pair of colorings yields one candidate bijection, which is
checked against the original colors before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BudgetExceeded, CoherentConfiguration, ColoredGraph, InputError
from .lie import characteristic, order_candidates
from .permgroup import (
    PermutationGroup,
    intersection,
    is_simple,
    is_transitive,
    normalizer,
    orbits,
    point_stabilizer,
    sylow_subgroups,
)
from .wl import Incompatible, compatible_closure, paired_refine, point_extension, wl_closure

MAX_POINTS = 120
MAX_NODES = 200_000


@dataclass
class IsoSearchNode:
    """State of one branch: points fixed so far and the jointly refined colorings."""

    left: tuple
    right: tuple
    c1: np.ndarray
    c2: np.ndarray


def _phi_array(phi, rank: int) -> np.ndarray:
    if phi is None:
        return np.arange(rank)
    if isinstance(phi, dict):
        arr = np.full(rank, -1, dtype=np.int64)
        for a, b in phi.items():
            arr[int(a)] = int(b)
    else:
        arr = np.asarray(list(phi), dtype=np.int64)
    if len(arr) != rank or sorted(arr.tolist()) != list(range(rank)):
        raise InputError("phi must be a bijection of the basis relations")
    return arr


def is_isomorphism(x: CoherentConfiguration, x2: CoherentConfiguration, f, phi=None) -> bool:
    """Whether ``(i, j) in s`` implies ``(f[i], f[j]) in phi(s)`` for all pairs."""
    f = np.asarray(f)
    arr = _phi_array(phi, x.rank)
    return bool(np.array_equal(x2.colors[np.ix_(f, f)], arr[x.colors]))


def _discrete(c: np.ndarray) -> bool:
    d = np.diagonal(c)
    return len(np.unique(d)) == len(d)


def _target_cell(c: np.ndarray):
    """Points of the first smallest non-singleton fiber (by diagonal color)."""
    d = np.diagonal(c)
    cols, counts = np.unique(d, return_counts=True)
    big = counts > 1
    best = cols[big][np.argmin(counts[big])]
    return np.flatnonzero(d == best), int(best)


def iso_set(x: CoherentConfiguration, x2: CoherentConfiguration, phi=None, *,
            max_points: int = MAX_POINTS, max_nodes: int = MAX_NODES, first_only: bool = False) -> list:
    """All point bijections f with ``s^f = phi(s)`` for every basis relation s.

    Results are sorted lexicographically.  Raises :class:`BudgetExceeded` when
    the search tree grows beyond ``max_nodes`` refinements.
    """
    if x.n != x2.n or x.rank != x2.rank:
        return []
    if x.n > max_points:
        raise BudgetExceeded(f"isomorphism search limited to {max_points} points", x.n, max_points)
    arr = _phi_array(phi, x.rank)
    inv = np.empty_like(arr)
    inv[arr] = np.arange(len(arr))
    start = paired_refine(x.colors, inv[x2.colors])
    if start is None:
        return []
    found = []
    nodes = 0
    stack = [IsoSearchNode((), (), start[0], start[1])]
    while stack:
        node = stack.pop()
        c1, c2 = node.c1, node.c2
        if _discrete(c1):
            d1, d2 = np.diagonal(c1), np.diagonal(c2)
            f = np.empty(x.n, dtype=np.int64)
            f[np.argsort(d1)] = np.argsort(d2)
            if is_isomorphism(x, x2, f, arr):
                found.append(tuple(int(v) for v in f))
                if first_only:
                    break
            continue
        cell, color = _target_cell(c1)
        a = int(cell[0])
        fresh = int(max(c1.max(), c2.max())) + 1
        branches = []
        for b in np.flatnonzero(np.diagonal(c2) == color):
            nodes += 1
            if nodes > max_nodes:
                raise BudgetExceeded(f"isomorphism search exceeded {max_nodes} nodes", None, max_nodes)
            e1 = c1.copy()
            e2 = c2.copy()
            e1[a, a] = fresh
            e2[b, b] = fresh
            res = paired_refine(e1, e2)
            if res is not None:
                branches.append(IsoSearchNode(node.left + (a,), node.right + (int(b),), res[0], res[1]))
        stack.extend(reversed(branches))
    return sorted(found)


def aut_group(x: CoherentConfiguration, **budget) -> PermutationGroup:
    """The automorphism group, enumerated in full by :func:`iso_set`."""
    elems = iso_set(x, x, None, **budget)
    return PermutationGroup.from_elements(np.array(elems, dtype=np.int32), x.n)


# -- recognition ------------------------------------------------------------------

@dataclass
class RecognitionReport:
    accepted: bool
    stage_failed: int | None = None
    reason: str = ""
    scheme: CoherentConfiguration | None = None
    base_pair: tuple | None = None
    group_order: int | None = None
    candidate_families: list = field(default_factory=list)
    recognized_as: list = field(default_factory=list)
    H_order: int | None = None
    P_order: int | None = None
    B_order: int | None = None
    N_order: int | None = None
    characteristic: int | None = None
    sylow_conditions: dict = field(default_factory=dict)
    group: PermutationGroup | None = None
    caveats: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "stage_failed": self.stage_failed,
            "reason": self.reason,
            "n": self.scheme.n if self.scheme is not None else None,
            "rank": self.scheme.rank if self.scheme is not None else None,
            "base_pair": list(self.base_pair) if self.base_pair else None,
            "group_order": self.group_order,
            "candidate_families": [list(c) for c in self.candidate_families],
            "recognized_as": [list(c) for c in self.recognized_as],
            "H_order": self.H_order,
            "P_order": self.P_order,
            "B_order": self.B_order,
            "N_order": self.N_order,
            "characteristic": self.characteristic,
            "sylow_conditions": self.sylow_conditions,
            "caveats": list(self.caveats),
        }


def _find_base_pair(x: CoherentConfiguration):
    for a in range(x.n):
        xa = point_extension(x, [a])
        for b in range(a + 1, x.n):
            if point_extension(xa, [b]).is_complete:
                return a, b
    return None


def _sylow_with_conditions(G: PermutationGroup, H: PermutationGroup, p: int):
    """A Sylow p-subgroup P with H n P = 1, H <= N_G(P) and |N_G(P)| = |H||P|."""
    for P in sylow_subgroups(G, p):
        if intersection(H, P).order != 1:
            continue
        NP = normalizer(G, P)
        if H.is_subgroup_of(NP) and NP.order == H.order * P.order:
            return P, NP
    return None, None


def recognize_cartan(d, *, max_points: int = MAX_POINTS, max_nodes: int = MAX_NODES,
                     max_l: int = 8, max_q: int = 64) -> RecognitionReport:
    """Decide whether the closure of ``d`` is the Cartan scheme of a simple group of Lie type."""
    g = d if isinstance(d, ColoredGraph) else ColoredGraph(np.asarray(getattr(d, "colors", d)))
    if g.n > max_points:
        raise BudgetExceeded(f"recognition limited to {max_points} points", g.n, max_points)
    # Step 1
    x, _ = wl_closure(g, names=False)
    rep = RecognitionReport(False, scheme=x)
    rep.caveats.append("N computed as N_G(H)")
    # Step 2
    pair = _find_base_pair(x)
    if pair is None:
        rep.stage_failed, rep.reason = 2, "no base of size 2: b(X) > 2"
        return rep
    rep.base_pair = pair
    # Step 3
    try:
        G = aut_group(x, max_points=max_points, max_nodes=max_nodes)
    except BudgetExceeded as exc:
        rep.stage_failed, rep.reason = 3, f"automorphism group out of budget: {exc}"
        return rep
    rep.group, rep.group_order = G, G.order
    if not is_transitive(G):
        rep.stage_failed, rep.reason = 3, f"automorphism group is not transitive ({len(orbits(G))} orbits)"
        return rep
    if not is_simple(G):
        rep.stage_failed, rep.reason = 3, "automorphism group is not simple"
        return rep
    # Step 4
    cands = order_candidates(G.order, max_l, max_q)
    rep.candidate_families = cands
    if not cands:
        rep.stage_failed, rep.reason = 4, f"no group of Lie type has order {G.order}"
        return rep
    if len(cands) > 1:
        rep.caveats.append("several groups of Lie type share this order; all are listed")
    # Step 5
    alpha = pair[0]
    H = point_stabilizer(G, alpha)
    rep.H_order = H.order
    chosen = None
    for fam in cands:
        p = characteristic(fam[2])
        P, NP = _sylow_with_conditions(G, H, p)
        rep.sylow_conditions[f"{fam[0]}_{fam[1]}({fam[2]})"] = P is not None
        if P is not None:
            rep.recognized_as.append(fam)
            if chosen is None:
                chosen = (p, P, NP)
    if chosen is None:
        rep.stage_failed, rep.reason = 5, "no Sylow subgroup P with H n P = 1 and N_G(P) = HP"
        return rep
    # Step 6
    p, P, NP = chosen
    rep.characteristic = p
    rep.P_order = P.order
    rep.B_order = NP.order
    rep.N_order = normalizer(G, H).order
    rep.accepted = True
    return rep


@dataclass
class IsoResult:
    algebraically_isomorphic: bool
    isomorphisms: list
    reason: str = ""

    def to_json(self, all_maps: bool = False) -> dict:
        out = {
            "algebraically_isomorphic": self.algebraically_isomorphic,
            "isomorphic": bool(self.isomorphisms),
            "count": len(self.isomorphisms),
            "reason": self.reason,
        }
        if all_maps:
            out["isomorphisms"] = [list(f) for f in self.isomorphisms]
        elif self.isomorphisms:
            out["isomorphism"] = list(self.isomorphisms[0])
        return out


def iso_graphs(d: ColoredGraph, d2: ColoredGraph, psi=None, *, check_aut: bool = True,
               first_only: bool = False, **budget) -> IsoResult:
    """Isomorphisms between two colored graphs that map each color c to ``psi(c)``."""
    cc = compatible_closure(d, d2, psi)
    if isinstance(cc, Incompatible):
        return IsoResult(False, [], f"no algebraic isomorphism: {cc.reason} (round {cc.round})")
    isos = iso_set(cc.x, cc.x2, None, first_only=first_only, **budget)
    if isos and check_aut and not first_only:
        aut = iso_set(cc.x, cc.x, None, **budget)
        assert len(aut) == len(isos), "|Iso| must equal |Aut|"
    reason = "" if isos else "algebraically isomorphic but no combinatorial isomorphism"
    return IsoResult(True, isos, reason)
