"""Finite permutation groups, fully enumerated.

Permutations act on the right: ``alpha ** g == g[alpha]`` and the product
``g * h`` means "first g, then h", i.e. the array ``h[g]``.  Conjugation is
``h ** g == g^-1 h g``.  Elements are stored sorted lexicographically, so the
identity always has index 0.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy import factorint

from .core import BudgetExceeded, CoherentConfiguration, InputError

DEFAULT_ORDER_BUDGET = 10 ** 6
DEFAULT_DEGREE_BUDGET = 5000


def _key(p) -> bytes:
    return np.asarray(p, dtype=np.int32).tobytes()


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int32)


def mul(g, h) -> np.ndarray:
    """``g * h``: apply g, then h."""
    return np.asarray(h)[np.asarray(g)]


def inverse(g) -> np.ndarray:
    g = np.asarray(g)
    inv = np.empty_like(g)
    inv[g] = np.arange(len(g), dtype=g.dtype)
    return inv


def conj(h, g) -> np.ndarray:
    """``h ** g = g^-1 h g``."""
    return mul(mul(inverse(g), h), g)


def check_perm(p, degree=None) -> np.ndarray:
    p = np.asarray(p, dtype=np.int32)
    n = len(p) if degree is None else degree
    if p.ndim != 1 or len(p) != n or not np.array_equal(np.sort(p), np.arange(n)):
        raise InputError("not a permutation of the expected degree")
    return p


def cycle(n: int, *cycles) -> np.ndarray:
    """Permutation of degree n from cycles given as tuples of points."""
    p = identity(n)
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            p[a] = b
    return p


class PermutationGroup:
    """A permutation group of small order with its elements materialized."""

    def __init__(self, generators, degree=None, *, elements=None, budget=DEFAULT_ORDER_BUDGET):
        gens = [np.asarray(g, dtype=np.int32) for g in generators]
        if degree is None:
            if not gens and elements is None:
                raise InputError("degree required for a group without generators")
            degree = len(gens[0]) if gens else elements.shape[1]
        self.degree = int(degree)
        self.generators = [check_perm(g, self.degree) for g in gens]
        self.budget = budget
        if elements is not None:
            self._set_elements(np.asarray(elements, dtype=np.int32))

    @classmethod
    def from_elements(cls, elements, degree=None) -> "PermutationGroup":
        """Subgroup given by a full element list (closure is trusted, not re-derived)."""
        elements = np.asarray(elements, dtype=np.int32)
        if degree is None:
            degree = elements.shape[1]
        elements = elements.reshape(-1, degree)
        G = cls([], degree, elements=elements)
        G.generators = _small_generating_set(G)
        return G

    def _set_elements(self, elems: np.ndarray):
        order = np.lexsort(elems.T[::-1])
        elems = np.ascontiguousarray(elems[order])
        elems.setflags(write=False)
        self.__dict__["elements"] = elems
        self.__dict__["_index"] = {e.tobytes(): i for i, e in enumerate(elems)}

    @cached_property
    def elements(self) -> np.ndarray:
        found = {_key(identity(self.degree)): identity(self.degree)}
        queue = deque(found.values())
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = g[x]
                k = y.tobytes()
                if k not in found:
                    found[k] = y
                    if len(found) > self.budget:
                        raise BudgetExceeded(
                            f"group order exceeds budget {self.budget}", None, self.budget
                        )
                    queue.append(y)
        self._set_elements(np.array(list(found.values()), dtype=np.int32))
        return self.__dict__["elements"]

    @cached_property
    def _index(self) -> dict:
        self.elements
        return self.__dict__["_index"]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.order

    def index(self, g) -> int:
        try:
            return self._index[_key(g)]
        except KeyError:
            raise KeyError("not an element of the group") from None

    def __contains__(self, g) -> bool:
        return _key(g) in self._index

    def indices(self, rows) -> np.ndarray:
        rows = np.ascontiguousarray(np.asarray(rows, dtype=np.int32))
        return np.array([self._index[r.tobytes()] for r in rows], dtype=np.int64)

    def is_subgroup_of(self, other: "PermutationGroup") -> bool:
        return all(e in other for e in self.elements)

    def key_set(self) -> frozenset:
        return frozenset(self._index)

    def __repr__(self):
        order = self.order if "elements" in self.__dict__ else "?"
        return f"PermutationGroup(degree={self.degree}, order={order})"

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [g.tolist() for g in self.generators]}

    @classmethod
    def from_json(cls, obj) -> "PermutationGroup":
        try:
            return cls([np.array(g) for g in obj["generators"]], int(obj["degree"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad group JSON: {exc}") from exc


def closure(generators, degree=None, budget=DEFAULT_ORDER_BUDGET) -> PermutationGroup:
    """Group generated by ``generators``, enumerated breadth first."""
    G = PermutationGroup(generators, degree, budget=budget)
    G.elements
    return G


def _small_generating_set(G: PermutationGroup) -> list:
    """Greedy generating set: add elements until their closure is the whole group."""
    gens = []
    have = {_key(identity(G.degree))}
    if G.order == 1:
        return gens
    for e in G.elements[1:]:
        if e.tobytes() in have:
            continue
        gens.append(e.copy())
        have = closure(gens, G.degree).key_set()
        if len(have) == G.order:
            break
    return gens


def subgroup(G: PermutationGroup, generators) -> PermutationGroup:
    return closure(list(generators), G.degree, G.budget)


def _generated_order_reaches(degree, candidates, target: int) -> int:
    """Order of the subgroup generated by ``candidates``, added one by one, stopping at ``target``."""
    gens = []
    have = {_key(identity(degree))}
    for c in candidates:
        if c.tobytes() in have:
            continue
        gens.append(c)
        have = closure(gens, degree).key_set()
        if len(have) >= target:
            break
    return len(have)


# -- orbits and stabilizers --------------------------------------------------

def orbits(G: PermutationGroup, points=None) -> list[list[int]]:
    """Orbits on {0..degree-1}, each sorted, ordered by smallest point."""
    n = G.degree
    rows, cols = [], []
    for g in G.generators:
        rows.append(np.arange(n))
        cols.append(g)
    if rows:
        data = np.ones(sum(len(r) for r in rows))
        adj = coo_matrix((data, (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
        _, labels = connected_components(adj, directed=True, connection="weak")
    else:
        labels = np.arange(n)
    groups = {}
    for p, lab in enumerate(labels):
        groups.setdefault(lab, []).append(p)
    result = sorted(groups.values())
    if points is not None:
        wanted = set(points)
        result = [o for o in result if wanted & set(o)]
    return result


def is_transitive(G: PermutationGroup) -> bool:
    return len(orbits(G)) == 1


def point_stabilizer(G: PermutationGroup, alpha: int) -> PermutationGroup:
    E = G.elements
    return PermutationGroup.from_elements(E[E[:, alpha] == alpha], G.degree)


def conjugates_of(G: PermutationGroup, x) -> np.ndarray:
    """All ``x ** g`` for g in G (one row per element of G, with repetition)."""
    E = G.elements
    Einv = np.empty_like(E)
    np.put_along_axis(Einv, E.astype(np.int64), np.arange(G.degree, dtype=np.int32)[None, :].repeat(len(E), 0), axis=1)
    # (g^-1 x g)[a] = g[x[g^-1[a]]]
    return np.take_along_axis(E, np.asarray(x)[Einv], axis=1)


def conjugacy_classes(G: PermutationGroup) -> list[list[int]]:
    """Conjugacy classes as sorted lists of element indices, identity class first."""
    seen = np.zeros(G.order, dtype=bool)
    classes = []
    for i in range(G.order):
        if seen[i]:
            continue
        idx = np.unique(G.indices(conjugates_of(G, G.elements[i])))
        seen[idx] = True
        classes.append([int(j) for j in idx])
    return classes


def centralizer(G: PermutationGroup, x) -> PermutationGroup:
    E = G.elements
    x = np.asarray(x)
    gx = x[E]  # g * x
    xg = E[:, x]  # x * g
    return PermutationGroup.from_elements(E[np.all(gx == xg, axis=1)], G.degree)


def normalizer(G: PermutationGroup, K: PermutationGroup) -> PermutationGroup:
    E = G.elements
    ok = np.ones(len(E), dtype=bool)
    keys = K._index
    for k in K.generators:
        conj_rows = conjugates_of(G, k)
        ok &= np.array([r.tobytes() in keys for r in conj_rows])
    return PermutationGroup.from_elements(E[ok], G.degree)


def intersection(A: PermutationGroup, B: PermutationGroup) -> PermutationGroup:
    keys = B._index
    rows = [e for e in A.elements if e.tobytes() in keys]
    return PermutationGroup.from_elements(np.array(rows), A.degree)


def right_cosets(G: PermutationGroup, H: PermutationGroup) -> list[list[int]]:
    """Right cosets ``H g`` as sorted element-index lists, ordered by least element."""
    seen = np.zeros(G.order, dtype=bool)
    out = []
    HE = H.elements
    for i in range(G.order):
        if seen[i]:
            continue
        g = G.elements[i]
        idx = np.unique(G.indices(g[HE]))  # h * g
        seen[idx] = True
        out.append([int(j) for j in idx])
    return out


def double_cosets(G: PermutationGroup, H: PermutationGroup) -> list[list[int]]:
    """Double cosets ``H g H`` as sorted element-index lists, ordered by least element."""
    seen = np.zeros(G.order, dtype=bool)
    out = []
    HE = H.elements
    for i in range(G.order):
        if seen[i]:
            continue
        g = G.elements[i]
        hg = g[HE]  # h * g
        prods = np.stack([hk[hg] for hk in HE]).reshape(-1, G.degree)  # (h g) * k
        idx = np.unique(G.indices(prods))
        seen[idx] = True
        out.append([int(j) for j in idx])
    return out


# -- characters and fixed points ---------------------------------------------

def fix_set(x) -> list[int]:
    x = np.asarray(x)
    return [int(a) for a in np.flatnonzero(x == np.arange(len(x)))]


def permutation_character(x) -> int:
    x = np.asarray(x)
    return int(np.count_nonzero(x == np.arange(len(x))))


def fixity(G: PermutationGroup) -> int:
    """Largest number of points fixed by a non-identity element."""
    E = G.elements[1:]
    if len(E) == 0:
        return 0
    return int(np.max(np.count_nonzero(E == np.arange(G.degree), axis=1)))


class FusionHypothesisError(ValueError):
    def __init__(self, h1, h2):
        super().__init__(f"elements {h1} and {h2} of H are conjugate in G but not in N")
        self.pair = (h1, h2)


def check_fusion(G: PermutationGroup, H: PermutationGroup, N: PermutationGroup):
    """Raise unless any two elements of H conjugate in G are already conjugate in N."""
    hkeys = H._index
    for h in H.elements:
        in_g = {r.tobytes() for r in conjugates_of(G, h) if r.tobytes() in hkeys}
        in_n = {r.tobytes() for r in conjugates_of(N, h) if r.tobytes() in hkeys}
        if in_g != in_n:
            other = next(iter(in_g - in_n))
            raise FusionHypothesisError(H.index(h), H.index(np.frombuffer(other, dtype=np.int32)))


def chi_via_formula(G: PermutationGroup, alpha: int, x, N: PermutationGroup, *, check=True):
    """Fixed-point count of ``x`` from centralizer and class sizes.

    With ``H`` the stabilizer of ``alpha`` and ``x = h0 ** g0``, returns
    ``(|N : C ∩ N| * n / |x^G|, fixed_points)`` where ``C = C_G(h0)`` and
    ``fixed_points = {alpha ** g : g in N C g0}``.  Returns ``(0, set())`` when
    no conjugate of ``x`` lies in ``H``.
    """
    H = point_stabilizer(G, alpha)
    if not H.is_subgroup_of(N) or not N.is_subgroup_of(normalizer(G, H)):
        raise InputError("N must satisfy H <= N <= N_G(H)")
    if check:
        check_fusion(G, H, N)
    x = np.asarray(x, dtype=np.int32)
    E = G.elements
    # g0 with g0 x g0^-1 in H  <=>  x = h0 ** g0
    hkeys = H._index
    h0 = g0 = None
    for g in E:
        cand = mul(mul(g, x), inverse(g))
        if cand.tobytes() in hkeys:
            h0, g0 = cand, g
            break
    if h0 is None:
        return 0, set()
    C = centralizer(G, h0)
    class_size = len(np.unique(G.indices(conjugates_of(G, x))))
    CN = intersection(C, N)
    n = len(orbits(G, [alpha])[0])
    value = (N.order // CN.order) * n // class_size
    assert (N.order // CN.order) * n % class_size == 0
    pts = set()
    for nn in N.elements:
        for c in C.elements:
            pts.add(int(g0[c[nn[alpha]]]))
    return value, pts


# -- simplicity and Sylow subgroups ------------------------------------------

def is_simple(G: PermutationGroup) -> bool:
    """True iff every non-identity conjugacy class generates the whole group."""
    if G.order == 1:
        return False
    for cls in conjugacy_classes(G)[1:]:
        rows = G.elements[cls]
        if _generated_order_reaches(G.degree, rows, G.order) < G.order:
            return False
    return True


def element_order(g) -> int:
    g = np.asarray(g)
    seen = np.zeros(len(g), dtype=bool)
    result = 1
    for a in range(len(g)):
        if seen[a]:
            continue
        length = 0
        b = a
        while not seen[b]:
            seen[b] = True
            b = g[b]
            length += 1
        result = result * length // gcd(result, length)
    return result


def p_part(m: int, p: int) -> int:
    return p ** factorint(m).get(p, 0)


def sylow_subgroup(G: PermutationGroup, p: int) -> PermutationGroup:
    """A Sylow p-subgroup, grown from a p-element of maximal order.

    A proper p-subgroup P always has a p-element in N_G(P) \\ P, and adjoining it
    gives a larger p-subgroup, so the greedy extension cannot get stuck.
    """
    if G.order % p:
        raise InputError(f"{p} does not divide |G| = {G.order}")
    target = p_part(G.order, p)
    E = G.elements
    orders = np.array([element_order(e) for e in E])
    is_p = np.array([o > 1 and p_part(o, p) == o for o in orders])
    best = int(np.argmax(np.where(is_p, orders, 0)))
    P = closure([E[best]], G.degree)
    while P.order < target:
        N = normalizer(G, P)
        pkeys = P._index
        for e in N.elements:
            o = element_order(e)
            if o > 1 and p_part(o, p) == o and e.tobytes() not in pkeys:
                P = closure(P.generators + [e], G.degree)
                break
        else:
            raise AssertionError("no p-element extends the p-subgroup")
    return P


def sylow_subgroups(G: PermutationGroup, p: int) -> list[PermutationGroup]:
    """All Sylow p-subgroups (conjugates of one), in a deterministic order."""
    P = sylow_subgroup(G, p)
    found = {}
    for g in G.elements:
        rows = np.stack([conj(e, g) for e in P.elements])
        K = PermutationGroup.from_elements(rows, G.degree)
        key = tuple(sorted(K._index))
        if key not in found:
            found[key] = K
    return [found[k] for k in sorted(found)]


# -- coherent configuration of a group ----------------------------------------

def inv_config(G: PermutationGroup) -> CoherentConfiguration:
    """The coherent configuration whose basis relations are the orbits of G on pairs.

    Relations are numbered with diagonal orbits first, then by their least pair
    in row-major order.
    """
    n = G.degree
    N = n * n
    base = np.arange(N)
    a, b = np.divmod(base, n)
    rows, cols = [], []
    for g in G.generators:
        rows.append(base)
        cols.append(g[a].astype(np.int64) * n + g[b])
    if rows:
        adj = coo_matrix((np.ones(len(rows) * N), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))
        _, labels = connected_components(adj, directed=True, connection="weak")
    else:
        labels = base.copy()
    # renumber by least pair: diagonal orbits first
    _, first = np.unique(labels, return_index=True)
    is_diag = (a[first] == b[first])
    order = np.lexsort((first, ~is_diag))
    lut = np.empty(len(first), dtype=np.int64)
    lut[order] = np.arange(len(first))
    colors = lut[labels].reshape(n, n)
    x = CoherentConfiguration(colors, _normalized=True)
    assert x.is_homogeneous == is_transitive(G)
    return x


def base_point_relations(x: CoherentConfiguration, G: PermutationGroup, alpha: int) -> dict:
    """``{s: D_s}`` with ``D_s = {g : (alpha, alpha ** g) in s}`` as element-index lists.

    Each ``D_s`` is checked to be a double coset of the stabilizer H of alpha and
    ``n_s = |D_s| / |H|``.
    """
    E = G.elements
    H = point_stabilizer(G, alpha)
    colors = x.colors[alpha, E[:, alpha]]
    out = {}
    for s in np.unique(colors):
        D = [int(i) for i in np.flatnonzero(colors == s)]
        if len(D) % H.order or len(D) // H.order != x.valency[int(s)]:
            raise AssertionError(f"|D_s| / |H| != n_s for relation {s}")
        out[int(s)] = D
    dcs = {tuple(d) for d in double_cosets(G, H)}
    if set(tuple(v) for v in out.values()) != dcs:
        raise AssertionError("relations do not correspond to double cosets")
    return out


# -- small standard groups ---------------------------------------------------

def cyclic_group(n: int) -> PermutationGroup:
    return PermutationGroup([np.roll(identity(n), -1)], n)


def dihedral_group(n: int) -> PermutationGroup:
    r = np.roll(identity(n), -1)
    s = (-identity(n)) % n
    return PermutationGroup([r, s.astype(np.int32)], n)


def symmetric_group(n: int) -> PermutationGroup:
    if n == 1:
        return PermutationGroup([], 1)
    return PermutationGroup([cycle(n, (0, 1)), np.roll(identity(n), -1)], n)


def alternating_group(n: int) -> PermutationGroup:
    if n < 3:
        return PermutationGroup([], n)
    gens = [cycle(n, (0, 1, k)) for k in range(2, n)]
    return PermutationGroup(gens, n)


def regular_representation(G: PermutationGroup) -> PermutationGroup:
    """Right regular action of G on its own element indices."""
    E = G.elements
    gens = []
    for g in G.generators:
        gens.append(G.indices(g[E]).astype(np.int32))  # e * g
    return PermutationGroup(gens, G.order)


@dataclass
class CosetAction:
    """Right multiplication of ``parent`` on the right cosets of ``subgroup``."""

    parent: PermutationGroup
    subgroup: PermutationGroup
    cosets: list  # element-index lists; cosets[k][0] is the least element
    action: PermutationGroup  # the induced permutation group on coset indices
    where: np.ndarray = field(repr=False)  # element index -> coset index

    @property
    def degree(self) -> int:
        return len(self.cosets)

    def image(self, k: int, g) -> int:
        """Index of the coset ``(H r_k) g``."""
        rep = self.parent.elements[self.cosets[k][0]]
        return int(self.where[self.parent.index(np.asarray(g)[rep])])

    def __iter__(self):
        return iter((self.action, self.cosets))


def coset_action(G: PermutationGroup, H: PermutationGroup) -> CosetAction:
    """Action of G on right cosets of H.

    The coset ``H`` itself has index 0 (its least element is the identity).
    Unpacks as ``(action_group, cosets)``.
    """
    cosets = right_cosets(G, H)
    if len(cosets) > DEFAULT_DEGREE_BUDGET:
        raise BudgetExceeded("coset action degree exceeds budget", len(cosets), DEFAULT_DEGREE_BUDGET)
    where = np.empty(G.order, dtype=np.int64)
    for k, cs in enumerate(cosets):
        where[cs] = k
    reps = G.elements[[c[0] for c in cosets]]
    gens = []
    for g in G.generators:
        gens.append(where[G.indices(g[reps])].astype(np.int32))  # rep * g
    action = PermutationGroup(gens, len(cosets))
    return CosetAction(G, H, cosets, action, where)


# -- indistinguishing number from the group side ------------------------------

@dataclass
class GroupIndistinguishing:
    value: int  # max over x not in H of |union of Fix(h x), h in H|
    coset: int | None  # index (in G.elements) of the least element of a maximizing coset
    fixity: int
    bound: int  # fixity * |H|

    def to_json(self) -> dict:
        return {"value": self.value, "coset": self.coset, "fixity": self.fixity, "bound": self.bound}


def group_indistinguishing(G: PermutationGroup, alpha: int = 0) -> GroupIndistinguishing:
    """c(inv(G)) computed from fixed points of the cosets ``Hx != H``, H = G_alpha.

    The result also carries the cruder bound ``fix(G) * |H|``.
    """
    E = G.elements
    fixed = E == np.arange(G.degree)
    key = E[:, alpha]  # Hx is determined by alpha ** x
    union = np.zeros((G.degree, G.degree), dtype=bool)
    np.logical_or.at(union, key, fixed)
    sizes = union.sum(axis=1)
    sizes[alpha] = -1
    sizes[np.bincount(key, minlength=G.degree) == 0] = -1
    best = int(np.argmax(sizes))
    H_order = int(np.count_nonzero(key == alpha))
    fx = fixity(G)
    if sizes[best] < 0:
        return GroupIndistinguishing(0, None, fx, fx * H_order)
    least = int(np.flatnonzero(key == best)[0])
    return GroupIndistinguishing(int(sizes[best]), least, fx, fx * H_order)


relation_coset_bijection = base_point_relations
