import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohconf.core import (
    BudgetExceeded,
    ColoredGraph,
    InputError,
    complete_configuration,
    cycle_graph,
    intersection_tensor,
    is_fusion,
    is_one_regular,
    same_partition,
    trivial_configuration,
    verify_coherence,
)
from cohconf.permgroup import dihedral_group
from cohconf.wl import Incompatible, compatible_closure, m_extension, paired_refine, point_extension, wl_closure
from oracles import naive_wl, orbit_partition, partition_of
from zoo import cartan, relabeled, scheme_zoo


def random_graph(draw_rows):
    c = np.array(draw_rows)
    _, c = np.unique(c, return_inverse=True)
    return ColoredGraph(c.reshape(len(draw_rows), len(draw_rows)))


graphs = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n), min_size=n, max_size=n)
).map(random_graph)


def test_coherent_input_is_fixed():
    for name in ("cartan5", "thin_C6", "dihedral5", "S4_on_klein_cosets"):
        x = scheme_zoo()[name]
        y, trace = wl_closure(x.graph)
        assert same_partition(x.colors, y.colors)
        assert trace.rounds == 1


def test_five_cycle_is_dihedral_orbital_scheme():
    x, _ = wl_closure(cycle_graph(5))
    D = dihedral_group(5)
    assert x.rank == 3
    assert partition_of(x.colors) == partition_of(orbit_partition(D.generators, 5))


def test_two_cliques():
    a = np.zeros((7, 7), dtype=int)
    a[:3, :3] = 1
    a[3:, 3:] = 1
    np.fill_diagonal(a, 0)
    g = ColoredGraph(a)  # color 0 marks the diagonal and the non-edges alike
    x, _ = wl_closure(g)
    assert sorted(len(f) for f in x.fibers) == [3, 4]


@settings(max_examples=80, deadline=None)
@given(graphs)
def test_closure_matches_naive_wl(g):
    x, trace = wl_closure(g)
    assert verify_coherence(x.graph)
    assert is_fusion(g.colors, x.colors)
    assert partition_of(x.colors) == partition_of(naive_wl(g.colors))
    assert all(a <= b for a, b in zip(trace.history, trace.history[1:]))
    assert trace.history[-1] == trace.history[-2]


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_idempotent(g):
    x, _ = wl_closure(g)
    y, _ = wl_closure(x.graph)
    assert np.array_equal(x.colors, y.colors)


@settings(max_examples=60, deadline=None)
@given(graphs, st.randoms(use_true_random=False))
def test_relabeling_equivariance_with_names(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    x, t1 = wl_closure(g)
    y, t2 = wl_closure(g.relabel(perm))
    assert np.array_equal(y.colors, x.relabel(perm).colors)
    assert t1.canonical_names == t2.canonical_names


def test_relabeling_equivariance_cartan():
    x = cartan(7).scheme
    colors, perm = relabeled(x.colors, 3)
    y, _ = wl_closure(ColoredGraph(colors))
    assert np.array_equal(y.colors, x.relabel(perm).colors)


@settings(max_examples=60, deadline=None)
@given(graphs, st.data())
def test_monotone(g, data):
    # h refines g: split one color class of g by a random subset
    c = g.colors.copy()
    mask = np.array(data.draw(st.lists(st.booleans(), min_size=c.size, max_size=c.size))).reshape(c.shape)
    h = np.where(mask, c + c.max() + 1, c)
    _, h = np.unique(h, return_inverse=True)
    h = ColoredGraph(h.reshape(c.shape))
    xg, _ = wl_closure(g)
    xh, _ = wl_closure(h)
    assert is_fusion(xg.colors, xh.colors)


@settings(max_examples=50, deadline=None)
@given(graphs, st.data())
def test_extension_compositional(g, data):
    x, _ = wl_closure(g)
    pts = data.draw(st.lists(st.integers(0, x.n - 1), unique=True, max_size=min(3, x.n)))
    k = data.draw(st.integers(0, len(pts)))
    A, B = pts[:k], pts[k:]
    whole = point_extension(x, pts)
    step = point_extension(point_extension(x, A), B)
    assert same_partition(whole.colors, step.colors)
    assert is_fusion(x.colors, whole.colors)
    for p in pts:
        assert whole.fibers[whole.fiber_of_point[p]] == (p,)


def test_extension_examples():
    x = scheme_zoo()["thin_C5"]
    assert point_extension(x, []) is x
    assert point_extension(x, [2]).is_complete
    b = cartan(5)
    assert is_one_regular(point_extension(b.scheme, [b.alpha]))
    with pytest.raises(InputError):
        point_extension(x, [1, 1])
    with pytest.raises(InputError):
        point_extension(x, [5])


def test_m_extension_trivial3():
    x = trivial_configuration(3)
    y = m_extension(x, 2)
    assert verify_coherence(y.graph)
    diag = [a * 3 + a for a in range(3)]
    for f in y.fibers:
        assert set(f) <= set(diag) or not set(f) & set(diag)


def test_m_extension_complete2_is_complete4():
    y = m_extension(complete_configuration(2), 2)
    assert y.n == 4 and y.is_complete


def test_m_extension_contains_cartesian_square():
    x, _ = wl_closure(cycle_graph(5))
    y = m_extension(x, 2)
    n = x.n
    square = (x.colors[:, None, :, None] * x.rank + x.colors[None, :, None, :]).reshape(n * n, n * n)
    assert is_fusion(square, y.colors)
    # counting the pair-to-pair intersection numbers directly
    T = intersection_tensor(y)
    assert sum(T[r, s, 0] for r in range(y.rank) for s in range(y.rank)) == y.n


def test_m_extension_budget():
    with pytest.raises(BudgetExceeded) as exc:
        m_extension(cartan(5).scheme, 2, budget=800)
    assert exc.value.required == 900
    with pytest.raises(InputError):
        m_extension(trivial_configuration(3), 3)


def test_compatible_closure_examples():
    g = cycle_graph(6)
    cc = compatible_closure(g, g)
    assert cc and all(k == v for k, v in cc.phi.items())
    colors, perm = relabeled(g.colors, 1)
    cc = compatible_closure(g, ColoredGraph(colors))
    assert cc
    assert np.array_equal(cc.x.relabel(perm).colors, cc.x2.colors)
    b = cartan(5, "pgl2")
    triv = trivial_configuration(30)
    res = compatible_closure(b.scheme.graph, ColoredGraph(np.where(np.eye(30, dtype=bool), 0, 1)))
    assert isinstance(res, Incompatible) and not res
    with pytest.raises(InputError):
        compatible_closure(g, g, [0, 0, 1])
    assert triv.rank == 2


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_self_compatible(g):
    assert compatible_closure(g, g)


def test_paired_refine_detects_rank_mismatch():
    a = cycle_graph(6).colors
    b = np.where(np.eye(6, dtype=bool), 0, 1)
    b[0, 3] = b[3, 0] = 2
    b[1, 4] = b[4, 1] = 2
    b[2, 5] = b[5, 2] = 2
    assert paired_refine(a, b) is None


pairs = st.integers(2, 6).flatmap(
    lambda n: st.tuples(*[st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n)] * 2)
)


def _sym_graph(rows):
    c = np.array(rows)
    c = np.triu(c, 1)
    c = c + c.T + 2 * np.eye(len(c), dtype=int)
    _, c = np.unique(c, return_inverse=True)
    return ColoredGraph(c.reshape(len(rows), len(rows)))


@settings(max_examples=80, deadline=None)
@given(pairs)
def test_incompatible_iff_no_algebraic_isomorphism(rows):
    from oracles import brute_algebraic_isomorphism

    g1, g2 = _sym_graph(rows[0]), _sym_graph(rows[1])
    cc = compatible_closure(g1, g2)
    w1, w2 = naive_wl(g1.colors), naive_wl(g2.colors)
    rank = len({v for row in w1 for v in row})
    if g1.palette_size != g2.palette_size or rank > 7:
        return
    expected = brute_algebraic_isomorphism(w1, w2, g1.colors, g2.colors)
    assert bool(cc) == expected
    if cc:
        assert intersection_tensor(cc.x).entries == intersection_tensor(cc.x2).entries
