"""Structural analysis of homogeneous coherent configurations.

Covers indistinguishing numbers, the maximum-valency graph ``s_max`` and the
local graphs ``s_alpha``, the pair counts ``p_u(delta)``, base numbers and
separability certificates.  Quantities with two independent formulas are
computed both ways and compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import (
    BudgetExceeded,
    CoherentConfiguration,
    InputError,
    IntersectionTensor,
    intersection_tensor,
    regular_points,
)
from .wl import point_extension

MAX_DENSE_RANK = 600


def _require_homogeneous(x: CoherentConfiguration):
    if not x.is_homogeneous:
        raise InputError("configuration is not homogeneous")


def _dense(x: CoherentConfiguration, tensor=None) -> np.ndarray:
    if x.rank > MAX_DENSE_RANK:
        raise BudgetExceeded(f"rank {x.rank} too large for a dense tensor", x.rank, MAX_DENSE_RANK)
    if tensor is None:
        tensor = intersection_tensor(x)
    return tensor.dense() if isinstance(tensor, IntersectionTensor) else np.asarray(tensor)


# -- indistinguishing numbers ---------------------------------------------------

@dataclass
class Indistinguishing:
    per_relation: dict  # non-diagonal color -> c(r)
    c: int
    argmax: int | None

    def to_json(self) -> dict:
        return {"per_relation": {str(k): v for k, v in self.per_relation.items()}, "c": self.c, "argmax": self.argmax}


def indistinguishing_numbers(x: CoherentConfiguration, tensor=None) -> Indistinguishing:
    """``c(r) = sum_s c_{s s*}^r``, checked against a direct count of
    ``{gamma : r(gamma, alpha) = r(gamma, beta)}`` at a representative pair."""
    _require_homogeneous(x)
    T = _dense(x, tensor)
    star = np.array(x.transpose_map)
    colors = x.colors
    per = {}
    for r in range(x.rank):
        if r in x.diagonal_colors:
            continue
        via_tensor = int(T[np.arange(x.rank), star, r].sum())
        a, b = x.representative(r)
        direct = int(np.count_nonzero(colors[:, a] == colors[:, b]))
        if via_tensor != direct:
            raise AssertionError(f"c({r}): tensor sum {via_tensor} != direct count {direct}")
        per[r] = via_tensor
    if not per:
        return Indistinguishing({}, 0, None)
    arg = max(per, key=lambda r: (per[r], -r))
    return Indistinguishing(per, per[arg], arg)


# -- s_max and s_alpha ----------------------------------------------------------

@dataclass
class SMax:
    k: int
    relations: tuple
    matrix: np.ndarray  # boolean adjacency of s_max

    @property
    def connected(self) -> bool:
        return _connected(self.matrix)


def _connected(adj: np.ndarray) -> bool:
    if len(adj) <= 1:
        return True
    ncomp, _ = connected_components(csr_matrix(adj), directed=False)
    return ncomp == 1


def smax_relation(x: CoherentConfiguration) -> SMax:
    """Union of the non-diagonal relations of maximum valency."""
    _require_homogeneous(x)
    off = [s for s in range(x.rank) if s not in x.diagonal_colors]
    if not off:
        return SMax(0, (), np.zeros((x.n, x.n), dtype=bool))
    k = max(x.valency[s] for s in off)
    rel = tuple(s for s in off if x.valency[s] == k)
    mat = np.isin(x.colors, rel)
    assert np.array_equal(mat, mat.T), "s_max must be symmetric"
    return SMax(k, rel, mat)


@dataclass
class SAlphaGraph:
    alpha: int
    vertices: np.ndarray  # the points of alpha s_max, sorted
    adjacency: np.ndarray  # boolean, indexed like vertices
    labels: np.ndarray  # component label of each vertex

    @property
    def connected(self) -> bool:
        return len(self.vertices) == 0 or int(self.labels.max()) == 0

    @property
    def components(self) -> list[list[int]]:
        out = {}
        for v, lab in zip(self.vertices, self.labels):
            out.setdefault(int(lab), []).append(int(v))
        return [out[k] for k in sorted(out)]


def salpha_graph(x: CoherentConfiguration, alpha: int, tensor=None, smax: SMax | None = None) -> SAlphaGraph:
    """Graph on ``alpha s_max``: beta ~ gamma iff ``c_{r(alpha,beta), r(beta,gamma)}^{r(alpha,gamma)} = 1``."""
    _require_homogeneous(x)
    T = _dense(x, tensor)
    smax = smax or smax_relation(x)
    V = np.flatnonzero(smax.matrix[alpha])
    c = x.colors
    r = c[alpha, V]
    s = c[np.ix_(V, V)]
    adj = T[r[:, None], s, r[None, :]] == 1
    np.fill_diagonal(adj, False)
    assert np.array_equal(adj, adj.T), "s_alpha must be symmetric"
    if len(V):
        _, labels = connected_components(csr_matrix(adj), directed=False)
    else:
        labels = np.zeros(0, dtype=np.int64)
    return SAlphaGraph(alpha, V, adj, labels)


def component_sets(x: CoherentConfiguration, graph: SAlphaGraph, smax: SMax | None = None) -> dict:
    """``C(u)``: the components of ``s_alpha`` meeting ``alpha u``, for each u in S_max."""
    smax = smax or smax_relation(x)
    row = x.colors[graph.alpha, graph.vertices]
    return {int(u): frozenset(int(l) for l in graph.labels[row == u]) for u in smax.relations}


# -- p_u(delta) -------------------------------------------------------------------

def pu_profile(x: CoherentConfiguration, alpha: int, u: int, delta: int, tensor=None) -> int:
    """Number of ordered pairs of distinct beta, gamma in ``alpha u`` with
    ``r(beta, delta) = r(gamma, delta)``; also computed from intersection numbers."""
    _require_homogeneous(x)
    T = _dense(x, tensor)
    c = x.colors
    B = np.flatnonzero(c[alpha] == u)
    w = c[B, delta]
    direct = int(np.count_nonzero(w[:, None] == w[None, :]) - len(B))
    v = int(c[alpha, delta])
    col = T[u, :, v]
    big = col[col > 1]
    formula = int(np.sum(big * (big - 1)))
    if direct != formula:
        raise AssertionError(f"p_u(delta) mismatch for u={u}, delta={delta}: {direct} != {formula}")
    return direct


def pu_table(x: CoherentConfiguration, alpha: int, u: int, tensor=None) -> np.ndarray:
    """``p_u(delta)`` for every point delta (direct count only, vectorized)."""
    c = x.colors
    B = np.flatnonzero(c[alpha] == u)
    W = c[B, :]  # (k, n)
    eq = (W[:, None, :] == W[None, :, :]).sum(axis=(0, 1)) - len(B)
    return eq.astype(np.int64)


# -- base number and separability ---------------------------------------------------

@dataclass
class BaseNumber:
    value: int | None
    base: tuple | None
    exceeds_cap: bool
    cap: int

    def to_json(self) -> dict:
        return {
            "value": self.value if not self.exceeds_cap else "exceeds cap",
            "base": list(self.base) if self.base is not None else None,
            "exceeds_cap": self.exceeds_cap,
            "cap": self.cap,
        }


def base_number(x: CoherentConfiguration, cap: int = 5, singletons=None) -> BaseNumber:
    """Least |A| with a complete extension ``X_A``; subsets are tried in lexicographic order.

    ``singletons`` may map every point to whether its one-point extension is
    complete, when the caller has already computed that.
    """
    if cap < 0:
        raise InputError("cap must be nonnegative")
    if x.is_complete:
        return BaseNumber(0, (), False, cap)
    chain = {(): x}  # extensions along the current prefix only

    def extend(A):
        if A not in chain:
            prev = extend(A[:-1])
            for key in [key for key in chain if key != A[:len(key)]]:
                del chain[key]
            chain[A] = point_extension(prev, [A[-1]])
        return chain[A]

    for size in range(1, cap + 1):
        for A in combinations(range(x.n), size):
            if size == 1 and singletons is not None and len(singletons) == x.n:
                if singletons[A[0]]:
                    return BaseNumber(1, A, False, cap)
                continue
            if extend(A).is_complete:
                return BaseNumber(size, A, False, cap)
    return BaseNumber(None, None, True, cap)


@dataclass
class SeparabilityCertificate:
    m: int
    established: bool
    witness: int | None  # extension point for m = 2
    regular_point: int | None
    regular_fiber: tuple | None
    note: str = "'not established' is not a refutation"

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "established": self.established,
            "witness": self.witness,
            "regular_point": self.regular_point,
            "regular_fiber": list(self.regular_fiber) if self.regular_fiber is not None else None,
            "note": self.note,
        }


def _regular_fiber(x: CoherentConfiguration):
    pts = regular_points(x)
    if not pts:
        return None, None
    f = x.fiber_of_point[pts[0]]
    return pts[0], x.fibers[f]


def separability_certificate(x: CoherentConfiguration, m: int = 2) -> SeparabilityCertificate:
    """A 1-regular X (m = 1) or a point with a 1-regular extension (m = 2)."""
    if m not in (1, 2):
        raise InputError("m must be 1 or 2")
    if m == 1:
        p, fib = _regular_fiber(x)
        return SeparabilityCertificate(1, p is not None, None, p, fib)
    for alpha in range(x.n):
        ext = point_extension(x, [alpha])
        p, fib = _regular_fiber(ext)
        if p is not None:
            return SeparabilityCertificate(2, True, alpha, p, fib)
    return SeparabilityCertificate(2, False, None, None, None)


# -- structure report -----------------------------------------------------------------

@dataclass
class Finding:
    check: str
    holds: bool
    required: bool  # demanded by the hypothesis 2c(k-1) < n, k >= 2
    witness: dict = field(default_factory=dict)

    @property
    def violation(self) -> bool:
        return self.required and not self.holds

    def to_json(self) -> dict:
        return {"check": self.check, "holds": self.holds, "required": self.required,
                "violation": self.violation, "witness": self.witness}


@dataclass
class StructureReport:
    n: int
    rank: int
    k: int
    c: int
    inequality_holds: bool
    hypothesis: bool
    smax_connected: bool
    salpha_connected_per_point: dict
    alpha_smax_size: int
    base_number: BaseNumber | None
    one_regular_extensions: dict
    findings: list
    caveats: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [f for f in self.findings if f.violation]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rank": self.rank,
            "k": self.k,
            "c": self.c,
            "inequality_holds": self.inequality_holds,
            "hypothesis": self.hypothesis,
            "smax_connected": self.smax_connected,
            "salpha_connected_per_point": {str(a): v for a, v in sorted(self.salpha_connected_per_point.items())},
            "alpha_smax_size": self.alpha_smax_size,
            "base_number": self.base_number.to_json() if self.base_number else None,
            "one_regular_extensions": {str(a): v for a, v in sorted(self.one_regular_extensions.items())},
            "findings": [f.to_json() for f in self.findings],
            "violations": len(self.violations),
            "caveats": list(self.caveats),
        }


def criterion_report(x: CoherentConfiguration, points=None, *, base_cap: int = 5,
                     with_base: bool = True, base_pairs: bool = True) -> StructureReport:
    """Evaluate ``2c(k-1) < n`` and the structural consequences it should force.

    Every consequence is computed and reported as a :class:`Finding`; it is
    marked ``required`` only when the hypothesis holds, so a violation points
    at a bug or a counterexample.  ``points`` restricts the per-point checks.
    """
    _require_homogeneous(x)
    tensor = intersection_tensor(x)
    T = _dense(x, tensor)
    ind = indistinguishing_numbers(x, T)
    smax = smax_relation(x)
    n, k, c = x.n, smax.k, ind.c
    ineq = 2 * c * (k - 1) < n
    hyp = ineq and k >= 2
    points = list(range(n)) if points is None else [int(p) for p in points]
    caveats = []
    if len(points) < n:
        caveats.append(f"per-point checks restricted to {len(points)} of {n} points")
    salpha = {}
    one_reg = {}
    complete = {}
    half = []
    for a in points:
        g = salpha_graph(x, a, T, smax)
        salpha[a] = g.connected
        half.append(len(g.vertices))
        ext = point_extension(x, [a])
        one_reg[a] = bool(regular_points(ext))
        complete[a] = ext.is_complete
    size = half[0] if half else 0
    findings = [
        Finding("s_max connected", smax.connected, hyp),
        Finding("every s_alpha connected", all(salpha.values()), hyp,
                {"disconnected": [a for a, v in salpha.items() if not v][:10]}),
        Finding("|alpha s_max| > n/2", all(2 * h > n for h in half), hyp, {"alpha_smax_size": size}),
        Finding("every one-point extension 1-regular", all(one_reg.values()), hyp,
                {"failing": [a for a, v in one_reg.items() if not v][:10]}),
    ]
    bn = None
    if with_base:
        bn = base_number(x, base_cap, complete)
        findings.append(Finding("base number <= 2", bn.value is not None and bn.value <= 2, hyp,
                                {"base": list(bn.base) if bn.base else None}))
    if base_pairs and smax.connected and all(salpha.values()) and k >= 1:
        bad = []
        for a in points[:1]:
            for b in np.flatnonzero(smax.matrix[a]):
                if not point_extension(x, [a, int(b)]).is_complete:
                    bad.append([a, int(b)])
                    break
        findings.append(Finding("pairs in s_max are bases", not bad, True, {"failing_pair": bad[:1]}))
    return StructureReport(n, x.rank, k, c, ineq, hyp, smax.connected, salpha, size, bn, one_reg, findings, caveats)
