import itertools

import numpy as np
import pytest

from cohconf.core import BudgetExceeded, InputError, ColoredGraph, complete_configuration, trivial_configuration
from cohconf.recognition import aut_group, is_isomorphism, iso_graphs, iso_set, recognize_cartan
from oracles import brute_isomorphisms
from zoo import cartan, relabeled, scheme_zoo

SMALL = sorted(k for k, v in scheme_zoo().items() if v.n <= 9)


def test_trivial3_has_six_isomorphisms():
    x = trivial_configuration(3)
    assert iso_set(x, x) == sorted(itertools.permutations(range(3)))


@pytest.mark.parametrize("name", SMALL)
def test_iso_set_complete_against_brute_force(name):
    x = scheme_zoo()[name]
    y_colors, _ = relabeled(x.colors, 11)
    from cohconf.core import verify_coherence

    y = verify_coherence(ColoredGraph(y_colors))
    assert iso_set(x, y) == sorted(brute_isomorphisms(x.colors, y.colors))
    assert iso_set(x, x) == sorted(brute_isomorphisms(x.colors, x.colors))


def test_iso_set_respects_phi():
    x = scheme_zoo()["thin_C5"]
    phi = [0, 4, 3, 2, 1]  # inversion of colors
    maps = iso_set(x, x, phi)
    assert maps and all(is_isomorphism(x, x, f, phi) for f in maps)
    with pytest.raises(InputError):
        iso_set(x, x, [0, 0, 1, 2, 3])


def test_aut_examples():
    assert aut_group(scheme_zoo()["thin_C5"]).order == 5
    assert aut_group(complete_configuration(4)).order == 1
    assert aut_group(trivial_configuration(4)).order == 24


@pytest.mark.parametrize("q,variant", [(4, "sl2"), (5, "sl2"), (5, "pgl2")])
def test_aut_contains_builder_group(q, variant):
    b = cartan(q, variant)
    A = aut_group(b.scheme)
    assert b.G.is_subgroup_of(A)


def test_iso_budget():
    with pytest.raises(BudgetExceeded):
        iso_set(trivial_configuration(7), trivial_configuration(7), max_nodes=10)
    with pytest.raises(BudgetExceeded):
        iso_set(trivial_configuration(7), trivial_configuration(7), max_points=6)


@pytest.mark.parametrize("name,x,stage", [
    ("trivial30", trivial_configuration(30), 2),
    ("complete", complete_configuration(5), 3),
    ("thin_C6", scheme_zoo()["thin_C6"], 3),
    ("thin_C5", scheme_zoo()["thin_C5"], 4),
    ("five_cycle", scheme_zoo()["five_cycle"], 3),
])
def test_rejection_stages(name, x, stage):
    r = recognize_cartan(ColoredGraph(x.colors))
    assert not r.accepted and r.stage_failed == stage, r.reason
    assert r.to_json()["stage_failed"] == stage


def test_accepts_relabeled_cartan4():
    colors, _ = relabeled(cartan(4).scheme.colors, 5)
    r = recognize_cartan(ColoredGraph(colors))
    assert r.accepted and r.recognized_as == [("A", 1, 4)]
    assert (r.group_order, r.H_order, r.P_order, r.B_order, r.N_order, r.characteristic) == (60, 3, 4, 12, 6, 2)


def test_sl2_odd_q_recognized_through_psl():
    """For odd q the SL action factors through PSL, so H has order (q-1)/2."""
    colors, _ = relabeled(cartan(5).scheme.colors, 6)
    r = recognize_cartan(ColoredGraph(colors))
    assert r.accepted and (r.group_order, r.H_order, r.B_order, r.N_order) == (60, 2, 10, 4)


def test_pgl2_rejected_as_not_simple():
    r = recognize_cartan(ColoredGraph(cartan(5, "pgl2").scheme.colors))
    assert not r.accepted and r.stage_failed == 3 and r.group_order == 120


def test_recognition_deterministic():
    g = ColoredGraph(relabeled(cartan(4).scheme.colors, 8)[0])
    assert recognize_cartan(g).to_json() == recognize_cartan(g).to_json()


def test_iso_graphs_identity_and_count():
    x = scheme_zoo()["dihedral5"]
    res = iso_graphs(ColoredGraph(x.colors), ColoredGraph(x.colors))
    assert res.algebraically_isomorphic and tuple(range(x.n)) in res.isomorphisms
    assert len(res.isomorphisms) == aut_group(x).order == 10


def test_iso_graphs_cartan_vs_thin():
    a = cartan(5, "pgl2").scheme
    from cohconf.permgroup import cyclic_group, inv_config

    thin30 = inv_config(cyclic_group(30))
    res = iso_graphs(ColoredGraph(a.colors), ColoredGraph(thin30.colors))
    assert not res.algebraically_isomorphic and res.isomorphisms == []
    assert "no algebraic isomorphism" in res.reason


def test_iso_graphs_non_isomorphic_same_parameters():
    # two non-isomorphic 2-regular graphs on 6 points: C6 and two triangles
    c6 = np.zeros((6, 6), int)
    tt = np.zeros((6, 6), int)
    for i in range(6):
        c6[i, (i + 1) % 6] = c6[(i + 1) % 6, i] = 1
    for blk in ((0, 1, 2), (3, 4, 5)):
        for i, j in itertools.permutations(blk, 2):
            tt[i, j] = 1
    for m in (c6, tt):
        m[m == 0] = 2
        np.fill_diagonal(m, 0)
    res = iso_graphs(ColoredGraph(c6), ColoredGraph(tt))
    assert res.isomorphisms == []
