"""Single additive cost over a diagram: cheapest-path labels, cost-bounded
valid domains, and the machinery that reduces every cost shape to per-edge
prices.

The core identities, for a diagram where every edge carries one value and a
price: `up[u]` is the cheapest root-to-u prefix, `down[u]` the cheapest
u-to-terminal suffix, and value a at layer i stays valid under bound K iff
some layer-i edge with value a has up[src] + price + down[dst] <= K. Both
passes are one sweep over the edges, so a full relabel is linear.

Reduced diagrams (long edges allowed) get the same treatment with two
adjustments: a long edge's price adds the cheapest value of every skipped
layer, and a layer skipped entirely contributes its values through the
cheapest path jumping over it (`skip[i]`), corrected per value by the
difference to that layer's cheapest value.

Also here: semiring relabeling (same sweeps with (+,*) swapped in),
expansion of non-unary cost components into per-edge prices by splitting
nodes on the values still needed downstream, and re-encoding of a cost as an
explicit diagram layer.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .bdd import Bdd, CompiledBdd, make_encoding, value_cube
from .errors import LimitExceeded, ModelError
from .mdd import IndexedMdd, Mdd, expand_long_edges, extract_mdd, merge_isomorphic, _finalize
from .model import CostSpec


def layer_cost_tables(
    cost: CostSpec, domains: Sequence[int], var_ids: Sequence[int]
) -> list[np.ndarray]:
    """Unary tables in layer order; variables without a table cost 0."""
    tables = []
    for layer, var in enumerate(var_ids):
        row = cost.unary[var] if var < len(cost.unary) else ()
        if row:
            tables.append(np.asarray(row, dtype=np.float64))
        else:
            tables.append(np.zeros(domains[layer], dtype=np.float64))
    return tables


def edge_cost_array(im: IndexedMdd, cost: CostSpec) -> np.ndarray:
    """Per-edge prices. Non-unary specs must have been expanded into the
    diagram already (edges priced); unary specs are looked up per value."""
    if im.edge_cost is not None:
        return im.edge_cost
    if not cost.is_unary:
        raise ModelError(
            f"cost {cost.name!r} has non-unary components; expand it into the diagram first"
        )
    tables = layer_cost_tables(cost, im.domains, im.var_ids)
    if im.num_edges == 0:
        return np.zeros(0, dtype=np.float64)
    grid = np.zeros((im.n, int(max(im.domains))), dtype=np.float64)
    for layer, t in enumerate(tables):
        grid[layer, : len(t)] = t
    return grid[im.edge_layer, im.edge_val]


@dataclass
class ScalarLabels:
    up: np.ndarray
    down: np.ndarray

    def min_cost(self) -> float:
        return float(self.up[-1])


def label_scalar(im: IndexedMdd, edge_cost: np.ndarray) -> ScalarLabels:
    from .kernels import active

    up, down = active().scalar_labels(
        im.num_nodes, im.edge_layer_start, im.edge_src, im.edge_dst, edge_cost
    )
    return ScalarLabels(up=up, down=down)


def valid_domains_scalar(
    im: IndexedMdd, labels: ScalarLabels, edge_cost: np.ndarray, bound: float
) -> list[set[int]]:
    from .kernels import active

    if im.is_empty:
        return [set() for _ in range(im.n)]
    mask = active().scalar_domain_mask(
        im.n,
        im.max_domain(),
        im.edge_layer,
        im.edge_val,
        im.edge_src,
        im.edge_dst,
        edge_cost,
        labels.up,
        labels.down,
        float(bound),
    )
    return [set(np.nonzero(mask[l])[0].tolist()) for l in range(im.n)]


# ---------------------------------------------------------------------------
# long-edge (reduced diagram) engine
# ---------------------------------------------------------------------------


@dataclass
class LongLabels:
    up: list[float]
    down: list[float]
    skip: list[float]  # cheapest full path jumping over layer i, inf if none
    cmin: list[float]  # cheapest in-play value per layer
    tables: list[np.ndarray]


def _restricted_values(m: Mdd, rho_layers: Mapping[int, int], layer: int) -> range | tuple:
    v = rho_layers.get(layer)
    return range(m.domains[layer]) if v is None else (v,)


def label_long(
    m: Mdd, tables: Sequence[np.ndarray], rho_layers: Mapping[int, int] | None = None
) -> LongLabels:
    """Cheapest-path labels on a diagram that may carry long edges. `m` must
    already be restricted consistently with `rho_layers` (layer index ->
    pinned value); pinned layers price their skipped stretch at the pinned
    value."""
    rho_layers = rho_layers or {}
    n = m.n
    cmin = [min(float(tables[i][v]) for v in _restricted_values(m, rho_layers, i)) for i in range(n)]
    cum = [0.0] * (n + 1)
    for i in range(n):
        cum[i + 1] = cum[i] + cmin[i]

    def edge_price(lu: int, a: int, lw: int) -> float:
        return float(tables[lu][a]) + (cum[lw] - cum[lu + 1])

    num = m.num_nodes
    up = [math.inf] * num
    up[m.root] = 0.0
    for u in range(num):
        if up[u] == math.inf:
            continue
        lu = m.layer[u]
        for a, w in m.children[u]:
            c = up[u] + edge_price(lu, a, m.layer[w])
            if c < up[w]:
                up[w] = c
    down = [math.inf] * num
    down[m.terminal] = 0.0
    for u in range(num - 1, -1, -1):
        lu = m.layer[u]
        for a, w in m.children[u]:
            if down[w] == math.inf:
                continue
            c = edge_price(lu, a, m.layer[w]) + down[w]
            if c < down[u]:
                down[u] = c
    skip = [math.inf] * n
    for u in range(num):
        if up[u] == math.inf:
            continue
        lu = m.layer[u]
        for a, w in m.children[u]:
            if down[w] == math.inf:
                continue
            through = up[u] + edge_price(lu, a, m.layer[w]) + down[w]
            for i in range(lu + 1, m.layer[w]):
                if through < skip[i]:
                    skip[i] = through
    return LongLabels(up=up, down=down, skip=skip, cmin=cmin, tables=list(tables))


def valid_domains_long(
    m: Mdd,
    labels: LongLabels,
    bound: float,
    rho_layers: Mapping[int, int] | None = None,
) -> list[set[int]]:
    """Bounded valid domains per layer. Pinned layers short-circuit to their
    pinned value; layers jumped by long edges are served by `skip` with a
    per-value correction against the layer's cheapest value."""
    rho_layers = rho_layers or {}
    n = m.n
    if m.is_empty or labels.up[m.terminal] > bound:
        return [set() for _ in range(n)]
    out: list[set[int]] = [set() for _ in range(n)]
    for i, v in rho_layers.items():
        out[i].add(v)
    for u in range(m.num_nodes):
        if labels.up[u] == math.inf:
            continue
        lu = m.layer[u]
        if lu in rho_layers:
            continue
        for a, w in m.children[u]:
            if labels.down[w] == math.inf:
                continue
            lw = m.layer[w]
            price = float(labels.tables[lu][a]) + sum(labels.cmin[j] for j in range(lu + 1, lw))
            if labels.up[u] + price + labels.down[w] <= bound:
                out[lu].add(a)
    for i in range(n):
        if i in rho_layers or labels.skip[i] == math.inf:
            continue
        base = labels.skip[i] - labels.cmin[i]
        for a in range(m.domains[i]):
            if base + float(labels.tables[i][a]) <= bound:
                out[i].add(a)
    return out


# ---------------------------------------------------------------------------
# semiring relabeling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Semiring:
    """(aggregate, combine) pair with identities; combine runs along a path,
    aggregate folds across paths."""

    name: str
    zero: object
    one: object
    plus: Callable
    times: Callable


MIN_PLUS = Semiring("min-plus", math.inf, 0.0, min, operator.add)
COUNT = Semiring("count", 0, 1, operator.add, operator.mul)
SUM_PROD = Semiring("sum-prod", 0.0, 1.0, operator.add, operator.mul)

SEMIRINGS = {r.name: r for r in (MIN_PLUS, COUNT, SUM_PROD)}


@dataclass
class SemiringResult:
    total: object
    up: list
    down: list
    marginals: list[list]  # per layer, per value


def weights_from_tables(im: IndexedMdd, tables: Sequence[Sequence]) -> list:
    return [tables[int(im.edge_layer[e])][int(im.edge_val[e])] for e in range(im.num_edges)]


def semiring_labels(im: IndexedMdd, ring: Semiring, weights: Sequence) -> SemiringResult:
    """Generic up/down sweep; with (min, +) this reproduces `label_scalar`,
    with (+, *) it computes sums of per-path products (counts, probability
    mass)."""
    num = im.num_nodes
    up = [ring.zero] * num
    up[0] = ring.one
    src, dst = im.edge_src, im.edge_dst
    for e in range(im.num_edges):
        u, w = int(src[e]), int(dst[e])
        up[w] = ring.plus(up[w], ring.times(up[u], weights[e]))
    down = [ring.zero] * num
    down[num - 1] = ring.one
    for e in range(im.num_edges - 1, -1, -1):
        u, w = int(src[e]), int(dst[e])
        down[u] = ring.plus(down[u], ring.times(weights[e], down[w]))
    marginals: list[list] = [
        [ring.zero] * im.domains[l] for l in range(im.n)
    ]
    for e in range(im.num_edges):
        l, a = int(im.edge_layer[e]), int(im.edge_val[e])
        contrib = ring.times(up[int(src[e])], ring.times(weights[e], down[int(dst[e])]))
        marginals[l][a] = ring.plus(marginals[l][a], contrib)
    return SemiringResult(total=up[num - 1], up=up, down=down, marginals=marginals)


# ---------------------------------------------------------------------------
# non-unary costs: expansion into per-edge prices
# ---------------------------------------------------------------------------


def expand_costs(m: Mdd, cost: CostSpec, node_limit: int = 10**6) -> Mdd:
    """Split nodes so that every edge can carry a single price valid for all
    paths through it. A node is split by the values of earlier layers that
    some not-yet-completed component still needs; each component's price is
    charged on the layer where its last variable is decided. Fully unary
    costs split nothing and return the same structure, priced."""
    if m.has_long_edges():
        raise ModelError("expand long edges before expanding costs")
    layer_of_var = {v: t for t, v in enumerate(m.var_ids)}
    n = m.n
    comp_layers = []
    for comp in cost.components:
        layers = sorted(layer_of_var[v] for v in comp.scope)
        comp_layers.append((comp, layers, layers[-1]))
    completes_at: list[list] = [[] for _ in range(n)]
    for comp, layers, last in comp_layers:
        completes_at[last].append((comp, layers))
    relevant: list[set[int]] = [set() for _ in range(n + 1)]
    for comp, layers, last in comp_layers:
        for j in layers:
            for i in range(j + 1, last + 1):
                relevant[i].add(j)
    relevant_sorted = [tuple(sorted(s)) for s in relevant]
    unary = layer_cost_tables(cost, m.domains, m.var_ids)

    root_key = (m.root, ())
    terminal_key = (m.terminal, ())
    layer_of = {root_key: 0, terminal_key: n}
    edges: dict = {}
    prices: dict = {}
    stack = [root_key]
    seen = {root_key, terminal_key}
    while stack:
        key = stack.pop()
        u, mem = key
        lu = m.layer[u]
        vals = {j: mem[k] for k, j in enumerate(relevant_sorted[lu])}
        out = []
        for a, w in m.children[u]:
            vals[lu] = a
            price = float(unary[lu][a])
            for comp, layers in completes_at[lu]:
                price += comp.table[tuple(vals[layer_of_var[v]] for v in comp.scope)]
            lw = m.layer[w]
            mem2 = tuple(vals[j] for j in relevant_sorted[lw])
            key2 = (w, mem2)
            if key2 not in seen:
                if len(seen) >= node_limit:
                    raise LimitExceeded(f"cost expansion exceeded {node_limit} nodes")
                seen.add(key2)
                layer_of[key2] = lw
                stack.append(key2)
            out.append((a, key2))
            prices[(key, a)] = price
        del vals
        edges[key] = out
    return _finalize(n, m.domains, m.var_ids, layer_of, edges, root_key, terminal_key, prices)


# ---------------------------------------------------------------------------
# explicit cost layer
# ---------------------------------------------------------------------------


@dataclass
class EncodedCost:
    mdd: Mdd
    y_layer: int
    y_values: tuple  # cost totals, ascending; value k at the y layer means total y_values[k]
    y_var_id: int


def achievable_costs(m: Mdd, tables: Sequence[np.ndarray], cap: int = 10**5) -> list:
    """Distinct path totals, ascending."""
    if m.is_empty:
        return []
    sets: list[set] = [set() for _ in range(m.num_nodes)]
    sets[m.terminal] = {0}
    for u in range(m.num_nodes - 1, -1, -1):
        if u == m.terminal:
            continue
        lu = m.layer[u]
        acc = set()
        for a, w in m.children[u]:
            c = int(tables[lu][a])
            acc.update(c + s for s in sets[w])
        if len(acc) > cap:
            raise LimitExceeded(f"more than {cap} distinct cost totals")
        sets[u] = acc
    return sorted(sets[m.root])


def encode_cost_variable(
    m: Mdd, cost: CostSpec, position: int | None = None, node_limit: int = 10**7
) -> EncodedCost:
    """Rebuild the diagram with an extra layer whose value pins the exact
    total of `cost`. Routed through the bit-level kernel: paths of the input
    diagram are re-encoded together with the accumulated total, conjoined
    per node/total state, then extracted and merged back. The cost layer is
    forced wide: it needs one value per distinct total, and each of its
    nodes admits exactly one of them."""
    if m.has_long_edges():
        raise ModelError("expand long edges before encoding a cost layer")
    if not cost.is_unary:
        raise ModelError("explicit cost layer needs a unary cost; expand components first")
    if not cost.is_integral:
        raise ModelError("explicit cost layer needs integer costs")
    n = m.n
    pos = n if position is None else position
    if not 0 <= pos <= n:
        raise ModelError(f"cost layer position {pos} outside 0..{n}")
    tables = [t.astype(np.int64) for t in layer_cost_tables(cost, m.domains, m.var_ids)]
    totals = achievable_costs(m, tables)
    if not totals:
        raise ModelError("empty diagram has no cost totals to encode")
    y_index = {c: k for k, c in enumerate(totals)}
    y_var_id = max(m.var_ids) + 1
    domains2 = m.domains[:pos] + (len(totals),) + m.domains[pos:]
    var_ids2 = m.var_ids[:pos] + (y_var_id,) + m.var_ids[pos:]
    enc = make_encoding(domains2)
    bdd = Bdd(node_limit=node_limit)

    def new_layer(i: int) -> int:
        return i if i < pos else i + 1

    memo: dict[tuple[int, int], int] = {}

    def rel(u: int, s: int) -> int:
        if u == m.terminal:
            return value_cube(bdd, enc, pos, y_index[s])
        got = memo.get((u, s))
        if got is not None:
            return got
        lu = m.layer[u]
        f = 0
        for a, w in m.children[u]:
            g = rel(w, s + int(tables[lu][a]))
            f = bdd.apply_or(f, bdd.apply_and(value_cube(bdd, enc, new_layer(lu), a), g))
        memo[(u, s)] = f
        return f

    root = rel(m.root, 0)
    compiled = CompiledBdd(bdd=bdd, root=root, encoding=enc, layer_vars=var_ids2)
    out = merge_isomorphic(expand_long_edges(extract_mdd(compiled)))
    return EncodedCost(mdd=out, y_layer=pos, y_values=tuple(totals), y_var_id=y_var_id)
