"""Cartan schemes of SL(2, q) and friends, plus a generic coset-action builder.

Matrices ``[[a, b], [c, d]]`` are encoded by the integer
``((a*q + b)*q + c)*q + d`` over field indices, so sorting codes is the
row-major lexicographic order.  A projective group stores each class of
scalar multiples by its least code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BudgetExceeded, CoherentConfiguration, InputError
from .fields import FiniteField, finite_field, prime_power
from .permgroup import (
    PermutationGroup,
    base_point_relations,
    closure,
    coset_action,
    intersection,
    inv_config,
    conj,
)

MAX_Q = 32
VARIANTS = ("sl2", "psl2", "pgl2")


class MatrixGroup2:
    """A finite subgroup of PGL(2, q) or GL(2, q), fully enumerated.

    ``scalars`` lists the field elements whose scalar matrices are identified
    with the identity; ``(1,)`` gives a linear group.
    """

    def __init__(self, F: FiniteField, codes: np.ndarray, scalars=(1,)):
        self.F = F
        self.q = F.q
        self.scalars = tuple(scalars)
        self.codes = np.unique(self.normalize(codes))

    def unpack(self, codes):
        q = self.q
        codes = np.asarray(codes, dtype=np.int64)
        return codes // q ** 3, codes // q ** 2 % q, codes // q % q, codes % q

    def pack(self, a, b, c, d):
        q = self.q
        return ((a * q + b) * q + c) * q + d

    def normalize(self, codes):
        if len(self.scalars) == 1:
            return np.asarray(codes, dtype=np.int64)
        a, b, c, d = self.unpack(codes)
        M = self.F.mul
        best = None
        for s in self.scalars:
            cand = self.pack(M[s, a], M[s, b], M[s, c], M[s, d])
            best = cand if best is None else np.minimum(best, cand)
        return best

    def __len__(self):
        return len(self.codes)

    def index(self, codes) -> np.ndarray:
        codes = self.normalize(codes)
        idx = np.searchsorted(self.codes, codes)
        if np.any(idx >= len(self.codes)) or np.any(self.codes[np.minimum(idx, len(self.codes) - 1)] != codes):
            raise KeyError("matrix not in the group")
        return idx

    def mul_codes(self, x, y):
        """Codes of the products ``x @ y`` (broadcasting)."""
        A, M = self.F.add, self.F.mul
        a1, b1, c1, d1 = self.unpack(x)
        a2, b2, c2, d2 = self.unpack(y)
        a = A[M[a1, a2], M[b1, c2]]
        b = A[M[a1, b2], M[b1, d2]]
        c = A[M[c1, a2], M[d1, c2]]
        d = A[M[c1, b2], M[d1, d2]]
        return self.normalize(self.pack(a, b, c, d))

    def mat(self, a, b, c, d) -> int:
        return int(self.normalize(np.array([self.pack(a, b, c, d)]))[0])


def _all_codes(q):
    return np.arange(q ** 4, dtype=np.int64)


def _det(F, a, b, c, d):
    return F.sub(F.mul[a, d], F.mul[b, c])


@dataclass
class SL2Data:
    """A form of (P)SL(2, q) or PGL(2, q) with its standard subgroups as matrix codes."""

    q: int
    variant: str
    F: FiniteField
    group: MatrixGroup2
    H: np.ndarray
    B: np.ndarray
    N: np.ndarray
    U: np.ndarray
    V: np.ndarray
    generators: list
    xi: int  # primitive element of the field

    def order(self, name: str) -> int:
        return len(getattr(self, name)) if name != "G" else len(self.group)

    def u(self, x) -> int:
        return self.group.mat(1, x, 0, 1)

    def v(self, y) -> int:
        return self.group.mat(1, 0, y, 1)

    def i(self) -> int:
        F = self.F
        return self.group.mat(0, F.neg[1], 1, 0)


def _check_q(q: int):
    if not isinstance(q, (int, np.integer)) or prime_power(int(q)) is None:
        raise InputError(f"q={q} is not a prime power")
    if q <= 3:
        raise InputError("q > 3 required")
    if q > MAX_Q:
        raise BudgetExceeded(f"q={q} exceeds the supported range (q <= {MAX_Q})", q * q + q, MAX_Q ** 2 + MAX_Q)


def build_sl2(q: int, variant: str = "sl2", modulus=None) -> SL2Data:
    """SL(2, q) (or PSL / PGL) with diagonal H, upper-triangular B, monomial N = H u Hi and unipotent U, V."""
    _check_q(q)
    if variant not in VARIANTS:
        raise InputError(f"unknown variant {variant!r}")
    F = finite_field(q, modulus)
    one, neg = 1, F.neg
    nonzero = np.arange(1, q)
    codes = _all_codes(q)
    tmp = MatrixGroup2.__new__(MatrixGroup2)
    tmp.F, tmp.q, tmp.scalars = F, q, (1,)
    a, b, c, d = tmp.unpack(codes)
    det = _det(F, a, b, c, d)
    if variant == "pgl2":
        scalars = tuple(int(s) for s in nonzero)
        group = MatrixGroup2(F, codes[det != 0], scalars)
    else:
        scalars = (1,) if variant == "sl2" or neg[1] == 1 else (1, int(neg[1]))
        group = MatrixGroup2(F, codes[det == one], scalars)

    def sub(mats):
        return np.unique(group.normalize(np.array([tmp.pack(*m) for m in mats], dtype=np.int64)))

    inv = F.inv
    if variant == "pgl2":
        Hm = [(t, 0, 0, 1) for t in nonzero]
        Bm = [(t, x, 0, 1) for t in nonzero for x in range(q)]
        Nm = Hm + [(0, t, 1, 0) for t in nonzero]
    else:
        Hm = [(t, 0, 0, inv[t]) for t in nonzero]
        Bm = [(t, x, 0, inv[t]) for t in nonzero for x in range(q)]
        Nm = Hm + [(0, neg[inv[t]], t, 0) for t in nonzero]  # diag(t^-1, t) * i
    Um = [(1, x, 0, 1) for x in range(q)]
    Vm = [(1, 0, y, 1) for y in range(q)]
    gens = []
    for k in range(F.e):
        gens.append(group.mat(1, F.p ** k, 0, 1))
        gens.append(group.mat(1, 0, F.p ** k, 1))
    xi = F.primitive_element()
    if variant == "pgl2":
        gens.append(group.mat(xi, 0, 0, 1))
    data = SL2Data(q, variant, F, group, sub(Hm), sub(Bm), sub(Nm), sub(Um), sub(Vm), gens, xi)
    _check_matrix_subgroups(data)
    return data


def _check_matrix_subgroups(data: SL2Data):
    q = data.q
    G = data.group
    proj = 1 if data.variant == "sl2" else (q - 1 if data.variant == "pgl2" else len(G.scalars))
    lin = q * (q - 1) * (q + 1) * (q - 1 if data.variant == "pgl2" else 1)
    assert len(G) * proj == lin, "unexpected group order"
    h = q - 1 if data.variant != "psl2" else (q - 1) // len(G.scalars)
    assert len(data.H) == h and len(data.B) == q * h and len(data.N) == 2 * h
    assert len(data.U) == q and len(data.V) == q
    assert np.array_equal(np.intersect1d(data.B, data.N), data.H), "H != B n N"
    # closure under products
    for S in (data.H, data.B, data.N, data.U, data.V):
        prods = data.group.mul_codes(S[:, None], S[None, :])
        assert np.isin(prods, S).all()


# -- coset action --------------------------------------------------------------

@dataclass
class CosetActionData:
    labels: np.ndarray  # coset label of each group element (by code order)
    reps: np.ndarray  # least code of each coset, cosets ordered by it
    alpha: int  # label of the coset H itself

    @property
    def n(self) -> int:
        return len(self.reps)


def _matrix_cosets(data: SL2Data) -> CosetActionData:
    G = data.group
    best = np.full(len(G), np.iinfo(np.int64).max)
    for h in data.H:
        best = np.minimum(best, G.mul_codes(h, G.codes))  # h g
    reps, labels = np.unique(best, return_inverse=True)
    ident = G.mat(1, 0, 0, 1)
    alpha = int(labels[G.index([ident])[0]])
    return CosetActionData(labels.ravel(), reps, alpha)


def _perm_of(data: SL2Data, cosets: CosetActionData, g) -> np.ndarray:
    """Permutation of cosets induced by right multiplication with ``g``."""
    G = data.group
    return cosets.labels[G.index(G.mul_codes(cosets.reps, g))].astype(np.int32)


def _perm_group_of(data, cosets, codes, degree) -> PermutationGroup:
    perms = np.unique(np.stack([_perm_of(data, cosets, g) for g in codes]), axis=0)
    return PermutationGroup.from_elements(perms, degree)


@dataclass
class SpecialRelations:
    s1: int
    si: int
    su: int
    sv: int
    su_choices: dict  # field element x -> relation of (alpha, alpha^u(x))
    sv_choices: dict
    independent_of_choice: bool

    def to_json(self) -> dict:
        return {
            "s1": self.s1,
            "si": self.si,
            "su": self.su,
            "sv": self.sv,
            "su_choices": {str(k): v for k, v in self.su_choices.items()},
            "sv_choices": {str(k): v for k, v in self.sv_choices.items()},
            "independent_of_choice": self.independent_of_choice,
        }


@dataclass
class CartanSchemeBundle:
    q: int
    variant: str
    data: SL2Data
    cosets: CosetActionData
    G: PermutationGroup
    H: PermutationGroup
    B: PermutationGroup
    N: PermutationGroup
    U: PermutationGroup
    V: PermutationGroup
    scheme: CoherentConfiguration
    alpha: int
    tags: SpecialRelations | None = None
    g0: int | None = None  # element of U^# with H n H^g0 = 1 in the action
    caveats: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.scheme.n

    @property
    def k(self) -> int:
        return self.scheme.max_valency

    @property
    def rank(self) -> int:
        return self.scheme.rank

    @property
    def matrix_orders(self) -> dict:
        return {name: self.data.order(name) for name in ("G", "H", "B", "N", "U", "V")}

    def to_json(self) -> dict:
        sub = {}
        for name in ("H", "B", "N", "U", "V"):
            sub[name] = sorted(int(i) for i in self.G.indices(getattr(self, name).elements))
        return {
            "q": self.q,
            "variant": self.variant,
            "n": self.n,
            "rank": self.rank,
            "k": self.k,
            "alpha": self.alpha,
            "field_modulus": list(self.data.F.modulus),
            "group": self.G.to_json(),
            "group_order": self.G.order,
            "matrix_orders": self.matrix_orders,
            "subgroups": sub,
            "subgroup_orders": {name: getattr(self, name).order for name in ("H", "B", "N", "U", "V")},
            "tags": self.tags.to_json() if self.tags else None,
            "scheme": self.scheme.to_json(),
            "caveats": list(self.caveats),
        }


def cartan_scheme(q: int, variant: str = "sl2", modulus=None) -> CartanSchemeBundle:
    """The coherent configuration of the group acting on right cosets of its Cartan subgroup.

    ``sl2`` and ``psl2`` give the same action (the centre lies in H), and the
    ``psl2`` bundle asserts that its scheme equals the ``sl2`` one.  ``pgl2`` uses
    PGL(2, q) acting on cosets of the image of the diagonal group.
    """
    data = build_sl2(q, variant, modulus)
    cosets = _matrix_cosets(data)
    n = cosets.n
    if n != q * q + q:
        raise AssertionError(f"expected {q * q + q} cosets, got {n}")
    gens = [_perm_of(data, cosets, g) for g in data.generators]
    G = closure(gens, n)
    subs = {name: _perm_group_of(data, cosets, getattr(data, name), n) for name in ("H", "B", "N", "U", "V")}
    kernel = len(data.group) // G.order
    assert len(data.group) % G.order == 0
    scheme = inv_config(G)
    if not scheme.is_homogeneous:
        raise AssertionError("Cartan scheme should be homogeneous")
    caveats = []
    if kernel > 1:
        caveats.append(f"action has a kernel of order {kernel}; the induced group has order {G.order}")
    bundle = CartanSchemeBundle(q, variant, data, cosets, G, scheme=scheme, alpha=cosets.alpha, caveats=caveats, **subs)
    if variant == "psl2":
        ref = cartan_scheme(q, "sl2", modulus)
        assert np.array_equal(ref.scheme.colors, scheme.colors), "PSL and SL schemes differ"
        assert ref.alpha == bundle.alpha
    bundle.tags = tag_special_relations(bundle)
    bundle.g0 = trivial_intersection_witness(bundle)
    return bundle


def trivial_intersection_witness(bundle: CartanSchemeBundle):
    """Least code u in U^# with H n H^u trivial in the coset action, or None."""
    data = bundle.data
    Hp = bundle.H
    for ucode in data.U:
        if ucode == data.group.mat(1, 0, 0, 1):
            continue
        up = _perm_of(data, bundle.cosets, ucode)
        Hu = PermutationGroup.from_elements(np.stack([conj(h, up) for h in Hp.elements]), Hp.degree)
        if intersection(Hp, Hu).order == 1:
            return int(ucode)
    return None


def tag_special_relations(bundle: CartanSchemeBundle) -> SpecialRelations:
    """Relations containing ``(alpha, alpha^g)`` for g = 1, i, u(x), v(y).

    Several nonzero x, y are tried; ``independent_of_choice`` records whether
    they all give the same relation.
    """
    data = bundle.data
    x = bundle.scheme
    labels = bundle.cosets.labels
    G = data.group
    alpha = bundle.alpha

    def rel(code):
        return int(x.colors[alpha, labels[G.index([code])[0]]])

    choices = sorted({1, data.xi, *range(1, data.q)})
    su_choices = {c: rel(data.u(c)) for c in choices}
    sv_choices = {c: rel(data.v(c)) for c in choices}
    independent = len(set(su_choices.values())) == 1 and len(set(sv_choices.values())) == 1
    tags = SpecialRelations(
        s1=int(x.colors[alpha, alpha]),
        si=rel(data.i()),
        su=su_choices[1],
        sv=sv_choices[1],
        su_choices=su_choices,
        sv_choices=sv_choices,
        independent_of_choice=independent,
    )
    # the relations must match the double cosets H, HiH, HuH, HvH in the action
    D = base_point_relations(x, bundle.G, alpha)
    Gp = bundle.G
    for s, code in ((tags.si, data.i()), (tags.su, data.u(1)), (tags.sv, data.v(1))):
        g = _perm_of(data, bundle.cosets, code)
        assert Gp.index(g) in D[s]
    assert sorted(D[tags.s1]) == sorted(int(i) for i in Gp.indices(bundle.H.elements))
    return tags


@dataclass
class GenericScheme:
    scheme: CoherentConfiguration
    alpha: int
    action: PermutationGroup
    cosets: list

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "scheme": self.scheme.to_json(), "group": self.action.to_json()}


def generic_scheme(G: PermutationGroup, H: PermutationGroup) -> GenericScheme:
    """inv(G, G/H) with the coset H as base point (index 0)."""
    if not H.is_subgroup_of(G):
        raise InputError("H is not a subgroup of G")
    action, cosets = coset_action(G, H)
    return GenericScheme(inv_config(action), 0, action, cosets)
