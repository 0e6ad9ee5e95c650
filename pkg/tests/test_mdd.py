import numpy as np
import pytest

from mddconfig.bdd import build_bdd
from mddconfig.errors import ModelError
from mddconfig.mdd import (
    compile_catalogue,
    expand_long_edges,
    extract_mdd,
    indexed_to_mdd,
    merge_isomorphic,
    reduce_mdd,
    restrict,
    restrict_indexed,
    to_indexed,
)
from mddconfig.model import brute_force_solutions, brute_force_vd
from mddconfig.synth import random_model


def _pipeline(model):
    return merge_isomorphic(expand_long_edges(extract_mdd(build_bdd(model))))


def test_extract_tshirt(tshirt_model):
    m = extract_mdd(build_bdd(tshirt_model))
    m.check()
    assert m.enumerate_solutions() == brute_force_solutions(tshirt_model)


def test_expand_removes_long_edges(tshirt_model):
    m = extract_mdd(build_bdd(tshirt_model))
    e = expand_long_edges(m)
    e.check()
    assert not e.has_long_edges()
    assert e.enumerate_solutions() == m.enumerate_solutions()


def test_merge_tshirt_frozen_size(tshirt_model):
    m = _pipeline(tshirt_model)
    m.check()
    assert (m.num_nodes, m.num_edges) == (7, 13)
    assert m.enumerate_solutions() == brute_force_solutions(tshirt_model)
    again = merge_isomorphic(m)
    assert (again.num_nodes, again.num_edges) == (7, 13)  # fixpoint


def test_reduce_tshirt_frozen_size(tshirt_model):
    r = reduce_mdd(_pipeline(tshirt_model))
    r.check()
    assert (r.num_nodes, r.num_edges) == (6, 11)
    assert r.enumerate_solutions() == brute_force_solutions(tshirt_model)
    assert r.has_long_edges()  # x2 skipped under white/red/blue


def test_merge_collapses_duplicates():
    # two parallel chains with the same suffix collapse to one per layer
    from mddconfig.mdd import Mdd

    layer = [0, 1, 1, 2, 3]
    children = [
        [(0, 1), (1, 2)],
        [(0, 3)],
        [(0, 3)],
        [(0, 4), (1, 4)],
        [],
    ]
    m = Mdd(3, (2, 2, 2), (0, 1, 2), layer, children)
    m.check()
    g = merge_isomorphic(m)
    g.check()
    assert g.num_nodes == 4
    assert g.enumerate_solutions() == m.enumerate_solutions()


def test_restrict_exact_filter(tshirt_model):
    m = _pipeline(tshirt_model)
    r = restrict(m, {1: 0})
    r.check()
    assert r.enumerate_solutions() == [(0, 0, 0)]
    # restriction never mutates its input
    assert m.enumerate_solutions() == brute_force_solutions(tshirt_model)


def test_restrict_to_empty(tshirt_model):
    m = _pipeline(tshirt_model)
    r = restrict(m, {1: 0, 2: 1})  # small + STW is contradictory
    assert r.is_empty
    r.check()
    assert r.enumerate_solutions() == []


def test_restrict_value_out_of_range(tshirt_model):
    m = _pipeline(tshirt_model)
    with pytest.raises(ModelError):
        restrict(m, {0: 9})


def test_restrict_long_edges_keep_free_layers(tshirt_model):
    r = reduce_mdd(_pipeline(tshirt_model))
    s = restrict(r, {0: 1})  # white: x2 is on a skipped stretch
    s.check()
    assert s.enumerate_solutions() == [(1, 1, 1), (1, 2, 1)]


def test_count_matches_enumeration(tshirt_model):
    for m in (_pipeline(tshirt_model), reduce_mdd(_pipeline(tshirt_model))):
        assert m.count_solutions() == len(m.enumerate_solutions()) == 11
        dom = [set(range(d)) for d in m.domains]
        dom[0] = {0}
        assert m.count_solutions(dom) == len(m.enumerate_solutions(domains=dom)) == 5


@pytest.mark.parametrize("seed", range(30))
def test_pipeline_matches_brute_force(seed):
    model = random_model(seed)
    m = _pipeline(model)
    m.check()
    assert m.enumerate_solutions() == brute_force_solutions(model)
    r = reduce_mdd(m)
    r.check()
    assert r.enumerate_solutions() == brute_force_solutions(model)
    assert r.num_nodes <= m.num_nodes and r.num_edges <= m.num_edges


@pytest.mark.parametrize("seed", range(12))
def test_restrict_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    model = random_model(seed)
    m = _pipeline(model)
    sols = brute_force_solutions(model)
    if not sols:
        return
    sol = sols[rng.integers(len(sols))]
    var = int(rng.integers(model.n))
    rho = {var: sol[var]}
    want = [s for s in sols if s[var] == sol[var]]
    assert restrict(m, rho).enumerate_solutions() == want
    vd = brute_force_vd(model, rho)
    got = restrict(m, rho)
    for layer in range(m.n):
        values = {a for u in got.nodes_at_layer(layer) for a, _ in got.children[u]}
        assert values == vd[got.var_ids[layer]]


# -- catalogue compilation ----------------------------------------------------


def test_compile_catalogue_equals_model_pipeline(tshirt_model):
    rows = brute_force_solutions(tshirt_model)
    cat = compile_catalogue(rows, tshirt_model.domain_sizes())
    cat.check()
    assert cat.enumerate_solutions() == rows
    # canonical merged form: same node/edge counts as the BDD route
    m = _pipeline(tshirt_model)
    assert (cat.num_nodes, cat.num_edges) == (m.num_nodes, m.num_edges)


def test_compile_catalogue_validation():
    with pytest.raises(ModelError):
        compile_catalogue([(0, 1)], (2, 2, 2))
    with pytest.raises(ModelError):
        compile_catalogue([(0, 5)], (2, 2))
    empty = compile_catalogue([], (2, 2))
    assert empty.is_empty
    empty.check()


# -- indexed form -------------------------------------------------------------


def test_to_indexed_layout(tshirt_model):
    m = _pipeline(tshirt_model)
    im = to_indexed(m)
    assert im.num_nodes == m.num_nodes and im.num_edges == m.num_edges
    # edges sorted by source, hence by layer
    assert np.all(np.diff(im.edge_src) >= 0)
    assert np.all(np.diff(im.edge_layer) >= 0)
    # CSR slices agree with the mdd adjacency
    for u in range(im.num_nodes):
        lo, hi = int(im.out_start[u]), int(im.out_start[u + 1])
        assert [(int(im.edge_val[e]), int(im.edge_dst[e])) for e in range(lo, hi)] == m.children[u]
    for w in range(im.num_nodes):
        lo, hi = int(im.in_start[w]), int(im.in_start[w + 1])
        assert all(int(im.edge_dst[im.in_edges[e]]) == w for e in range(lo, hi))
    for layer in range(im.n):
        lo, hi = int(im.edge_layer_start[layer]), int(im.edge_layer_start[layer + 1])
        assert np.all(im.edge_layer[lo:hi] == layer)


def test_to_indexed_rejects_long_edges(tshirt_model):
    r = reduce_mdd(_pipeline(tshirt_model))
    with pytest.raises(ModelError):
        to_indexed(r)


def test_indexed_round_trip(tshirt_model):
    m = _pipeline(tshirt_model)
    back = indexed_to_mdd(to_indexed(m))
    back.check()
    assert back.children == m.children and back.layer == m.layer


@pytest.mark.parametrize("seed", range(12))
def test_restrict_indexed_matches_restrict(seed):
    rng = np.random.default_rng(1000 + seed)
    model = random_model(seed)
    m = _pipeline(model)
    sols = m.enumerate_solutions()
    if not sols:
        return
    im = to_indexed(m)
    sol = sols[rng.integers(len(sols))]
    var = int(rng.integers(model.n))
    layer = m.layer_of_var(var)
    got = restrict_indexed(im, {layer: sol[var]})
    assert got is not None
    assert indexed_to_mdd(got).enumerate_solutions() == restrict(
        m, {var: sol[var]}
    ).enumerate_solutions()


def test_restrict_indexed_contradiction_is_none(tshirt_model):
    im = to_indexed(_pipeline(tshirt_model))
    assert restrict_indexed(im, {1: 0, 2: 1}) is None
