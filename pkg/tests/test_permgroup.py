import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohconf.analysis import indistinguishing_numbers
from cohconf.core import BudgetExceeded, verify_coherence
from cohconf.permgroup import (
    FusionHypothesisError,
    PermutationGroup,
    alternating_group,
    centralizer,
    check_fusion,
    chi_via_formula,
    closure,
    conj,
    conjugacy_classes,
    coset_action,
    cycle,
    cyclic_group,
    dihedral_group,
    double_cosets,
    fix_set,
    fixity,
    group_indistinguishing,
    identity,
    inverse,
    inv_config,
    is_simple,
    mul,
    normalizer,
    orbits,
    permutation_character,
    point_stabilizer,
    relation_coset_bijection,
    right_cosets,
    subgroup,
    sylow_subgroup,
    sylow_subgroups,
    symmetric_group,
)
from oracles import orbit_partition, partition_of
from zoo import cartan, group_zoo, klein_in_s4, random_transitive

perm5 = st.permutations(range(5)).map(lambda p: np.array(p, dtype=np.int32))


@settings(max_examples=50, deadline=None)
@given(perm5, perm5, perm5)
def test_right_action_conventions(g, h, k):
    # alpha^(gh) = (alpha^g)^h
    gh = mul(g, h)
    for a in range(5):
        assert gh[a] == h[g[a]]
    assert np.array_equal(mul(mul(g, h), k), mul(g, mul(h, k)))
    assert np.array_equal(mul(g, inverse(g)), identity(5))
    assert np.array_equal(conj(h, g), mul(mul(inverse(g), h), g))


def test_closure_examples():
    assert closure([identity(4)], 4).order == 1
    assert closure([np.roll(identity(5), -1)], 5).order == 5
    assert symmetric_group(5).order == 120
    assert alternating_group(5).order == 60
    with pytest.raises(BudgetExceeded):
        closure(symmetric_group(8).generators, 8, budget=1000).elements


def test_group_closed():
    G = dihedral_group(6)
    keys = G.key_set()
    for a in G.elements:
        assert inverse(a).tobytes() in keys
        for b in G.elements:
            assert mul(a, b).tobytes() in keys
    for g in G.generators:
        assert g in G
    assert G.index(identity(6)) == 0


def test_inv_config_examples():
    assert inv_config(cyclic_group(5)).rank == 5
    assert set(inv_config(cyclic_group(5)).valency) == {1}
    assert inv_config(symmetric_group(3)).rank == 2
    assert cartan(5, "pgl2").scheme.rank == 9


@pytest.mark.parametrize("name", sorted(group_zoo()))
def test_inv_config_is_orbit_partition(name):
    G, _ = group_zoo()[name]
    x = inv_config(G)
    assert verify_coherence(x.graph)
    if G.degree <= 60:
        assert partition_of(x.colors) == partition_of(orbit_partition(G.generators, G.degree))


def test_stabilizer_classes_normalizer():
    C5 = cyclic_group(5)
    assert point_stabilizer(C5, 3).order == 1
    assert sorted(len(c) for c in conjugacy_classes(symmetric_group(3))) == [1, 2, 3]
    assert sorted(len(c) for c in conjugacy_classes(symmetric_group(4))) == [1, 3, 6, 6, 8]
    S4 = symmetric_group(4)
    assert centralizer(S4, cycle(4, (0, 1))).order == 4
    assert len(orbits(subgroup(S4, [cycle(4, (0, 1))]))) == 3


def test_normalizer_of_diagonal_group():
    b = cartan(5, "pgl2")
    assert normalizer(b.G, b.H).order == 8
    assert b.N.order == 8
    b7 = cartan(7, "pgl2")
    assert normalizer(b7.G, b7.H).order == 12


def test_normalizer_in_sl2_action():
    # in the action of SL(2,q), q odd, the image of the diagonal group has order (q-1)/2
    b = cartan(5)
    assert b.H.order == 2
    assert normalizer(b.G, b.H).order == 4


def test_double_coset_bijection():
    b = cartan(5, "pgl2")
    D = relation_coset_bijection(b.scheme, b.G, b.alpha)
    H = sorted(int(i) for i in b.G.indices(b.H.elements))
    assert D[b.tags.s1] == H
    assert len(D[b.tags.si]) == 4 and b.scheme.valency[b.tags.si] == 1
    assert len(D[b.tags.su]) == 16 and b.scheme.valency[b.tags.su] == 4


def test_cosets_partition_and_action():
    S4, K = klein_in_s4()
    rc = right_cosets(S4, K)
    assert sorted(i for c in rc for i in c) == list(range(24))
    ca = coset_action(S4, K)
    assert ca.degree == 6 and ca.cosets[0][0] == 0
    assert ca.action.order == 6  # K is normal, so S4 acts as S4/K
    # stabilizer of the coset K in the parent is K
    stab = [i for i, g in enumerate(S4.elements) if ca.image(0, g) == 0]
    assert stab == sorted(int(i) for i in S4.indices(K.elements))
    for k in range(6):
        for g in S4.generators:
            for h in S4.generators:
                assert ca.image(ca.image(k, g), h) == ca.image(k, mul(g, h))
    dc = double_cosets(S4, K)
    assert sorted(i for c in dc for i in c) == list(range(24))


def test_characters():
    G = cyclic_group(6)
    assert permutation_character(identity(6)) == 6
    assert fix_set(cycle(5, (0, 1))) == [2, 3, 4]
    assert fixity(G) == 0
    assert fixity(symmetric_group(5)) == 3


def _chi_cases():
    for q in (5, 7):
        b = cartan(q, "pgl2")
        yield f"pgl2_{q}", b.G, b.alpha, b.N
    b = cartan(4)
    yield "sl2_4", b.G, b.alpha, b.N


@pytest.mark.parametrize("case", list(_chi_cases()), ids=lambda c: c[0])
def test_chi_formula_matches_direct(case):
    _, G, alpha, N = case
    H = point_stabilizer(G, alpha)
    check_fusion(G, H, N)
    for cls in conjugacy_classes(G):
        x = G.elements[cls[0]]
        value, pts = chi_via_formula(G, alpha, x, N, check=False)
        assert value == permutation_character(x)
        assert pts == set(fix_set(x))


def test_chi_identity_and_disjoint_class():
    b = cartan(5, "pgl2")
    value, pts = chi_via_formula(b.G, b.alpha, identity(b.n), b.N)
    assert value == b.n and len(pts) == b.n
    u = b.U.generators[0]  # unipotent: no conjugate in H
    assert chi_via_formula(b.G, b.alpha, u, b.N) == (0, set())


def test_fusion_violation_detected():
    S4 = symmetric_group(4)
    K = subgroup(S4, [cycle(4, (0, 1)), cycle(4, (2, 3))])
    # (0 1) and (2 3) are conjugate in S4 but not in the abelian group K
    with pytest.raises(FusionHypothesisError):
        check_fusion(S4, K, K)
    H = point_stabilizer(S4, 3)
    check_fusion(S4, H, H)


def test_simplicity():
    assert is_simple(cyclic_group(5))
    assert not is_simple(cyclic_group(6))
    assert not is_simple(symmetric_group(4))
    assert is_simple(alternating_group(5))
    assert is_simple(cartan(5).G)  # PSL(2,5) acting on 30 cosets
    assert not is_simple(cartan(5, "pgl2").G)


def test_sylow():
    assert sylow_subgroup(cyclic_group(6), 2).order == 2
    assert sylow_subgroup(symmetric_group(4), 2).order == 8
    assert sylow_subgroup(alternating_group(5), 2).order == 4
    G = cartan(5, "pgl2").G
    assert sylow_subgroup(G, 5).order == 5
    assert sylow_subgroup(G, 2).order == 8
    Ps = sylow_subgroups(alternating_group(5), 5)
    assert len(Ps) == 6


def _regular_matrix_group(q):
    data = cartan(q).data
    mg = data.group
    gens = [mg.index(mg.mul_codes(mg.codes, g)).astype(np.int32) for g in data.generators]
    return data, PermutationGroup(gens, len(mg))


def test_sl2_5_on_its_own_elements():
    data, R = _regular_matrix_group(5)
    assert R.order == 120
    assert sylow_subgroup(R, 2).order == 8
    assert sylow_subgroup(R, 5).order == 5
    assert not is_simple(R)  # the centre {I, -I}


def _all_actions():
    for name, (G, alpha) in group_zoo().items():
        yield name, G, alpha
    for name, _x, G in random_transitive():
        yield name, G, 0


@pytest.mark.parametrize("case", list(_all_actions()), ids=lambda c: c[0])
def test_group_indistinguishing_and_fixity_bound(case):
    name, G, alpha = case
    x = inv_config(G)
    gi = group_indistinguishing(G, alpha)
    c = indistinguishing_numbers(x).c
    assert gi.value == c
    assert c <= gi.bound


def test_group_from_json_round_trip():
    G = dihedral_group(7)
    H = PermutationGroup.from_json(G.to_json())
    assert H.order == 14 and H.key_set() == G.key_set()
