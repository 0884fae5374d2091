import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohconf.core import (
    CoherentConfiguration,
    ColoredGraph,
    InputError,
    ViolationReport,
    complete_configuration,
    cycle_graph,
    fibers,
    intersection_tensor,
    is_homogeneous,
    is_one_regular,
    regular_points,
    same_partition,
    trivial_configuration,
    valencies,
    verify_coherence,
)
from oracles import brute_intersection_numbers
from zoo import cartan, scheme_zoo


def test_trivial_coloring_accepted():
    c = np.ones((4, 4), dtype=int)
    np.fill_diagonal(c, 0)
    x = verify_coherence(ColoredGraph(c))
    assert isinstance(x, CoherentConfiguration)
    assert x.rank == 2


def test_five_cycle_coloring_accepted_rank3():
    g = cycle_graph(5)
    assert brute_intersection_numbers(g.colors) is not None
    x = verify_coherence(g)
    assert x and x.rank == 3


def test_single_arc_rejected_by_transpose_axiom():
    c = np.ones((6, 6), dtype=int)
    np.fill_diagonal(c, 0)
    c[1, 4] = 2
    rep = verify_coherence(ColoredGraph(c))
    assert isinstance(rep, ViolationReport) and not rep
    assert rep.axiom == "transpose"
    assert rep.witness["color"] in (1, 2)


def test_diagonal_axiom_violation():
    c = np.zeros((3, 3), dtype=int)
    c[0, 1] = c[1, 0] = 1
    rep = verify_coherence(ColoredGraph(c))
    assert rep.axiom == "diagonal"


def test_regularity_violation_has_witness():
    # path on 4 vertices: edge classes are not regular
    a = np.zeros((4, 4), dtype=bool)
    for i in range(3):
        a[i, i + 1] = a[i + 1, i] = True
    c = np.where(a, 1, 2)
    np.fill_diagonal(c, 0)
    rep = verify_coherence(ColoredGraph(c))
    assert rep.axiom == "regularity"
    w = rep.witness
    assert w["counts"][0] != w["counts"][1]


def test_empty_color_class_rejected():
    with pytest.raises(InputError):
        ColoredGraph(np.array([[0, 2], [2, 0]]))
    with pytest.raises(InputError):
        ColoredGraph(np.zeros((2, 3), dtype=int))
    with pytest.raises(InputError):
        ColoredGraph.from_json({"n": 3, "colors": [[0, 1], [1, 0]]})


def test_json_round_trip():
    x = cartan(5).scheme
    obj = json.loads(json.dumps(x.to_json()))
    y = CoherentConfiguration.from_json(obj)
    assert np.array_equal(x.colors, y.colors)
    assert y.transpose_map == x.transpose_map and obj["rank"] == x.rank


def test_trivial_intersection_numbers():
    for n in (3, 5, 8):
        T = intersection_tensor(trivial_configuration(n))
        assert T[1, 1, 1] == n - 2


@pytest.mark.parametrize("name", sorted(scheme_zoo()))
def test_identity_relation_is_neutral(name):
    x = scheme_zoo()[name]
    T = intersection_tensor(x).dense()
    for s in range(x.rank):
        src = x.fiber_pair_of_color[s][0]
        one = x.diagonal_colors[src]
        assert T[one, s, s] == 1


@pytest.mark.parametrize("name", [k for k in sorted(scheme_zoo()) if scheme_zoo()[k].n <= 60])
def test_tensor_matches_brute_force(name):
    x = scheme_zoo()[name]
    oracle = brute_intersection_numbers(x.colors)
    assert oracle is not None
    T = intersection_tensor(x)
    assert {k: v for k, v in oracle.items() if v} == T.entries


@pytest.mark.parametrize("name", sorted(scheme_zoo()))
def test_tensor_identities(name):
    x = scheme_zoo()[name]
    T = intersection_tensor(x).dense()
    nv = np.array(x.valency)
    star = np.array(x.transpose_map)
    # row sums: sum_s c_{rs}^t = n_r whenever the fibers match
    for r in range(x.rank):
        for t in range(x.rank):
            if x.fiber_pair_of_color[r][0] == x.fiber_pair_of_color[t][0]:
                assert T[r, :, t].sum() == nv[r]
    if x.is_homogeneous:
        assert np.array_equal(T[star[:, None, None], star[None, :, None], star[None, None, :]],
                              T.transpose(1, 0, 2))
        # n_t c_{rs}^{t*} = n_r c_{st}^{r*} = n_s c_{tr}^{s*}, indices [r, s, t]
        a = nv[None, None, :] * T[:, :, star]
        b = nv[:, None, None] * T[:, :, star].transpose(2, 0, 1)
        c = nv[None, :, None] * T[:, :, star].transpose(1, 2, 0)
        assert np.array_equal(a, b) and np.array_equal(a, c)


def test_homogeneity_valencies_fibers():
    x = trivial_configuration(7)
    assert is_homogeneous(x)
    assert sorted(valencies(x).values()) == [1, 6]
    c = np.array([[0, 2, 3, 3, 3],
                  [2, 0, 3, 3, 3],
                  [4, 4, 1, 5, 5],
                  [4, 4, 5, 1, 5],
                  [4, 4, 5, 5, 1]])
    y = verify_coherence(ColoredGraph(c))
    assert y and not is_homogeneous(y)
    assert sorted(len(f) for f in fibers(y)) == [2, 3]


def test_cartan5_pgl2_valency_census():
    x = cartan(5, "pgl2").scheme
    assert x.is_homogeneous
    assert sorted(x.valency) == [1, 1] + [4] * 7


def test_regular_points_examples():
    assert regular_points(complete_configuration(3)) == [0, 1, 2]
    assert regular_points(trivial_configuration(4)) == []
    assert not is_one_regular(trivial_configuration(4))
    assert regular_points(scheme_zoo()["thin_C5"]) == list(range(5))


@pytest.mark.parametrize("name", sorted(scheme_zoo()))
def test_regular_points_union_of_fibers(name):
    x = scheme_zoo()[name]
    pts = set(regular_points(x))
    for f in x.fibers:
        assert set(f) <= pts or not set(f) & pts


@pytest.mark.parametrize("name", sorted(scheme_zoo()))
def test_verify_is_idempotent(name):
    x = scheme_zoo()[name]
    y = verify_coherence(x.graph)
    assert y and np.array_equal(y.colors, x.colors)
    assert y.transpose_map == x.transpose_map
    assert y.valency == x.valency and y.diagonal_colors == x.diagonal_colors


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n),
                                                      min_size=n, max_size=n)))
def test_verify_agrees_with_brute_force(rows):
    c = np.array(rows)
    # densify so the graph is well-formed
    _, c = np.unique(c, return_inverse=True)
    c = c.reshape(len(rows), len(rows))
    result = verify_coherence(ColoredGraph(c))
    diag = set(np.diagonal(c).tolist())
    off = set(c[~np.eye(len(c), dtype=bool)].tolist())
    transpose_ok = all(len({int(c[j, i]) for i, j in zip(*np.nonzero(c == col))}) == 1 for col in np.unique(c))
    coherent = not (diag & off) and transpose_ok and brute_intersection_numbers(c) is not None
    assert bool(result) == coherent
    if result:
        assert same_partition(result.colors, c)
