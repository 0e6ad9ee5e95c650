import math

import numpy as np
import pytest

from conftest import SolutionOracle
from mddconfig.errors import LimitExceeded, ModelError
from mddconfig.mdd import reduce_mdd, restrict, to_indexed
from mddconfig.model import catalogue_to_model
from mddconfig.singlecost import (
    SEMIRINGS,
    achievable_costs,
    edge_cost_array,
    encode_cost_variable,
    expand_costs,
    label_long,
    label_scalar,
    layer_cost_tables,
    semiring_labels,
    valid_domains_long,
    valid_domains_scalar,
    weights_from_tables,
)
from mddconfig.synth import random_model


@pytest.fixture(scope="module")
def tshirt_im(tshirt_artifact):
    return tshirt_artifact.indexed


@pytest.fixture(scope="module")
def tshirt_price(tshirt_artifact, tshirt_im):
    return edge_cost_array(tshirt_im, tshirt_artifact.model.costs["price"])


def test_layer_cost_tables(tshirt_artifact):
    m = tshirt_artifact.model
    tables = layer_cost_tables(m.costs["price"], m.domain_sizes(), (0, 1, 2))
    assert [t.tolist() for t in tables] == [[0, 1, 2, 3], [0, 1, 2], [0, 1]]
    # reordered layers pull the matching variable's table
    tables = layer_cost_tables(m.costs["price"], (2, 4, 3), (2, 0, 1))
    assert tables[0].tolist() == [0, 1]


def test_edge_cost_array_rejects_components(tshirt_catalogue):
    m = catalogue_to_model(tshirt_catalogue)
    from mddconfig.artifact import compile_model

    art = compile_model(m)
    with pytest.raises(ModelError, match="non-unary"):
        edge_cost_array(art.indexed, m.costs["price"])


def test_scalar_labels_tshirt(tshirt_im, tshirt_price):
    labels = label_scalar(tshirt_im, tshirt_price)
    assert labels.min_cost() == 0.0
    assert labels.up[0] == 0.0 and labels.down[tshirt_im.terminal] == 0.0
    # cheapest completion from the root equals the cheapest solution
    assert labels.down[0] == 0.0


def test_valid_domains_scalar_frozen(tshirt_im, tshirt_price):
    labels = label_scalar(tshirt_im, tshirt_price)
    assert valid_domains_scalar(tshirt_im, labels, tshirt_price, 0) == [{0}, {0}, {0}]
    assert valid_domains_scalar(tshirt_im, labels, tshirt_price, 3.0) == [
        {0, 1},
        {0, 1, 2},
        {0, 1},
    ]
    assert valid_domains_scalar(tshirt_im, labels, tshirt_price, 6.0) == [
        {0, 1, 2, 3},
        {0, 1, 2},
        {0, 1},
    ]
    assert valid_domains_scalar(tshirt_im, labels, tshirt_price, -1.0) == [
        set(),
        set(),
        set(),
    ]


@pytest.mark.parametrize("seed", range(15))
def test_scalar_vd_matches_oracle(seed, tshirt_artifact):
    from mddconfig.artifact import compile_model

    model = random_model(seed, n_costs=1)
    art = compile_model(model)
    oracle = SolutionOracle(model)
    if not oracle.solutions:
        return
    name = next(iter(model.costs))
    totals = oracle.costs[name]
    im = art.indexed
    ec = edge_cost_array(im, model.costs[name])
    labels = label_scalar(im, ec)
    for k in (float(totals.min()), float(np.median(totals)), float(totals.max())):
        got_layers = valid_domains_scalar(im, labels, ec, k)
        got = [set() for _ in range(model.n)]
        for layer, vals in enumerate(got_layers):
            got[im.var_ids[layer]] = vals
        assert got == oracle.valid_domains(bounds=[(name, k)])


# -- long-edge engine ---------------------------------------------------------


def _long_setup(artifact, cost_name):
    m = artifact.reduced
    model = artifact.model
    tables = layer_cost_tables(model.costs[cost_name], m.domains, m.var_ids)
    return m, tables


def test_long_engine_tshirt_frozen(tshirt_artifact):
    m, tables = _long_setup(tshirt_artifact, "price")
    assert m.has_long_edges()
    labels = label_long(m, tables)
    assert labels.up[m.terminal] == 0.0
    assert valid_domains_long(m, labels, 3.0) == [{0, 1}, {0, 1, 2}, {0, 1}]
    assert valid_domains_long(m, labels, 0.0) == [{0}, {0}, {0}]
    assert valid_domains_long(m, labels, -2.0) == [set(), set(), set()]


def test_long_engine_restricted(tshirt_artifact):
    # pinning white forces min price 3; x2 sits on a skipped stretch
    m, tables = _long_setup(tshirt_artifact, "price")
    rho = {0: 1}
    r = restrict(m, {m.var_ids[0]: 1})
    labels = label_long(r, tables, rho)
    assert labels.up[r.terminal] == 3.0
    assert valid_domains_long(r, labels, 3.0, rho) == [{1}, {1}, {1}]
    assert valid_domains_long(r, labels, 4.0, rho) == [{1}, {1, 2}, {1}]


@pytest.mark.parametrize("seed", range(15))
def test_long_engine_matches_scalar(seed):
    from mddconfig.artifact import compile_model

    model = random_model(seed, n_costs=1)
    art = compile_model(model, reduce=True)
    if art.mdd.is_empty:
        return
    name = next(iter(model.costs))
    im = art.indexed
    ec = edge_cost_array(im, model.costs[name])
    scalar = label_scalar(im, ec)
    m, tables = _long_setup(art, name)
    labels = label_long(m, tables)
    assert labels.up[m.terminal] == pytest.approx(float(scalar.up[im.terminal]))
    total = float(scalar.up[im.terminal])
    rng = np.random.default_rng(seed)
    for k in (total, total + 1.5, total + 4.0, float(rng.uniform(total, total + 8))):
        want = valid_domains_scalar(im, scalar, ec, k)
        assert valid_domains_long(m, labels, k) == want


# -- semirings ----------------------------------------------------------------


def test_count_semiring_tshirt(tshirt_im):
    ring = SEMIRINGS["count"]
    weights = [1] * tshirt_im.num_edges
    res = semiring_labels(tshirt_im, ring, weights)
    assert res.total == 11
    assert res.marginals[0] == [5, 2, 2, 2]  # black appears in 5 solutions
    assert res.marginals[2] == [3, 8]
    assert sum(res.marginals[1]) == 11


def test_min_plus_reproduces_scalar(tshirt_im, tshirt_price):
    ring = SEMIRINGS["min-plus"]
    res = semiring_labels(tshirt_im, ring, list(tshirt_price))
    scalar = label_scalar(tshirt_im, tshirt_price)
    assert res.total == pytest.approx(scalar.min_cost())
    assert res.up == pytest.approx(list(scalar.up))
    assert res.down == pytest.approx(list(scalar.down))


def test_sum_prod_probability_mass(tshirt_artifact, tshirt_im):
    # uniform per-value weights 1/|D| make total = sum over solutions of the
    # product, checkable by direct enumeration
    model = tshirt_artifact.model
    tables = [
        [1.0 / model.variables[v].size] * model.variables[v].size
        for v in tshirt_im.var_ids
    ]
    weights = weights_from_tables(tshirt_im, tables)
    res = semiring_labels(tshirt_im, SEMIRINGS["sum-prod"], weights)
    want = 11 * (1 / 4) * (1 / 3) * (1 / 2)
    assert res.total == pytest.approx(want, rel=1e-12)
    assert res.marginals[0][0] == pytest.approx(5 / 24, rel=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_count_marginals_match_enumeration(seed):
    from mddconfig.artifact import compile_model

    model = random_model(seed)
    art = compile_model(model)
    oracle = SolutionOracle(model)
    im = art.indexed
    res = semiring_labels(im, SEMIRINGS["count"], [1] * im.num_edges)
    assert res.total == len(oracle.solutions)
    for layer in range(im.n):
        var = im.var_ids[layer]
        for a in range(im.domains[layer]):
            want = sum(1 for s in oracle.solutions if s[var] == a)
            assert res.marginals[layer][a] == want


# -- non-unary expansion ------------------------------------------------------


def test_expand_costs_unary_prices_in_place(tshirt_artifact):
    m = tshirt_artifact.mdd
    priced = expand_costs(m, tshirt_artifact.model.costs["price"])
    priced.check()
    assert (priced.num_nodes, priced.num_edges) == (m.num_nodes, m.num_edges)
    assert priced.edge_cost is not None
    im = to_indexed(priced)
    labels = label_scalar(im, im.edge_cost)
    assert labels.min_cost() == 0.0


def test_expand_costs_catalogue_component(tshirt_catalogue):
    from mddconfig.artifact import compile_model

    model = catalogue_to_model(tshirt_catalogue)
    art = compile_model(model)
    oracle = SolutionOracle(model)
    priced = expand_costs(art.mdd, model.costs["price"])
    priced.check()
    assert priced.enumerate_solutions() == oracle.solutions
    im = to_indexed(priced)
    labels = label_scalar(im, im.edge_cost)
    assert labels.min_cost() == float(oracle.costs["price"].min())
    for k in (0.0, 3.0, 6.0):
        got_layers = valid_domains_scalar(im, labels, im.edge_cost, k)
        got = [set() for _ in range(model.n)]
        for layer, vals in enumerate(got_layers):
            got[im.var_ids[layer]] = vals
        assert got == oracle.valid_domains(bounds=[("price", k)])


def test_expand_costs_node_limit(tshirt_catalogue):
    from mddconfig.artifact import compile_model

    model = catalogue_to_model(tshirt_catalogue)
    art = compile_model(model)
    with pytest.raises(LimitExceeded):
        expand_costs(art.mdd, model.costs["price"], node_limit=3)


# -- explicit cost layer ------------------------------------------------------


def test_achievable_costs_tshirt(tshirt_artifact):
    m = tshirt_artifact.mdd
    model = tshirt_artifact.model
    tables = [
        np.asarray(t, dtype=np.int64)
        for t in layer_cost_tables(model.costs["price"], m.domains, m.var_ids)
    ]
    assert achievable_costs(m, tables) == [0, 1, 2, 3, 4, 5, 6]
    with pytest.raises(LimitExceeded):
        achievable_costs(m, tables, cap=3)


def test_encode_cost_variable_tshirt(tshirt_artifact):
    model = tshirt_artifact.model
    enc = encode_cost_variable(tshirt_artifact.mdd, model.costs["price"])
    out = enc.mdd
    out.check()
    assert enc.y_values == (0, 1, 2, 3, 4, 5, 6)
    assert out.domains[enc.y_layer] == 7
    # every extended solution carries the exact total of its prefix
    price = model.costs["price"]
    for sol in out.enumerate_solutions():
        base = tuple(sol[v] for v in range(model.n))
        y = sol[enc.y_var_id]
        assert enc.y_values[y] == price.evaluate(base)
    assert len(out.enumerate_solutions()) == 11
    # each cost-layer node admits exactly one value
    for u in out.nodes_at_layer(enc.y_layer):
        assert len(out.children[u]) == 1


def test_encode_cost_variable_position(tshirt_artifact):
    model = tshirt_artifact.model
    enc = encode_cost_variable(tshirt_artifact.mdd, model.costs["price"], position=0)
    assert enc.y_layer == 0
    assert enc.mdd.domains[0] == 7
    assert len(enc.mdd.enumerate_solutions()) == 11
    with pytest.raises(ModelError):
        encode_cost_variable(tshirt_artifact.mdd, model.costs["price"], position=9)


def test_encode_cost_variable_rejects_bad_specs(tshirt_artifact, tshirt_catalogue):
    from mddconfig.artifact import compile_model

    model = catalogue_to_model(tshirt_catalogue)
    art = compile_model(model)
    with pytest.raises(ModelError, match="unary"):
        encode_cost_variable(art.mdd, model.costs["price"])
    with pytest.raises(ModelError, match="expand long edges"):
        encode_cost_variable(
            tshirt_artifact.reduced, tshirt_artifact.model.costs["price"]
        )
