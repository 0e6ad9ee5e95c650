"""Layered multi-valued decision diagrams.

An `Mdd` has one node per id 0..num_nodes-1, topologically ordered by layer:
id 0 is the root at layer 0, the last id is the unique terminal at layer n.
Edges carry one value of their source layer's domain. An edge into a node
more than one layer down is *long*: it stands for its own value combined with
every value of each skipped layer, which is how reduced diagrams stay small.

Diagrams are produced here in three ways: extraction from a compiled BDD
(grouping the bit-level nodes block by block), direct union of catalogue
rows, and the structural transforms (`expand_long_edges`, `merge_isomorphic`,
`reduce_mdd`, `restrict`). All transforms are pure and return fresh diagrams.

`IndexedMdd` is the flat-array form consumed by the numeric kernels: edges
sorted by source node, CSR offsets per node and per layer, everything in
int64 numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bdd import Bdd, CompiledBdd, Encoding
from .errors import LimitExceeded, ModelError

Assignment = Mapping[int, int]


class Mdd:
    __slots__ = ("n", "domains", "var_ids", "layer", "children", "edge_cost")

    def __init__(
        self,
        n: int,
        domains: tuple[int, ...],
        var_ids: tuple[int, ...],
        layer: list[int],
        children: list[list[tuple[int, int]]],
        edge_cost: dict[tuple[int, int], float] | None = None,
    ):
        self.n = n
        self.domains = domains
        self.var_ids = var_ids  # layer -> model variable index
        self.layer = layer  # node id -> layer; terminal has layer n
        self.children = children  # node id -> [(value, dst)] sorted by value
        self.edge_cost = edge_cost  # (node, value) -> cost, when edges are priced

    @property
    def root(self) -> int:
        return 0

    @property
    def terminal(self) -> int:
        return len(self.layer) - 1

    @property
    def num_nodes(self) -> int:
        return len(self.layer)

    @property
    def num_edges(self) -> int:
        return sum(len(ch) for ch in self.children)

    @property
    def is_empty(self) -> bool:
        return not self.children[self.root]

    def layer_of_var(self, var: int) -> int:
        return self.var_ids.index(var)

    def nodes_at_layer(self, layer: int) -> list[int]:
        return [u for u in range(self.num_nodes) if self.layer[u] == layer]

    def has_long_edges(self) -> bool:
        return any(
            self.layer[w] > self.layer[u] + 1
            for u in range(self.num_nodes)
            for _, w in self.children[u]
        )

    def check(self):
        """Structural invariants; used by tests after every transform."""
        assert self.layer[self.root] == 0, "root must sit at layer 0"
        assert self.layer[self.terminal] == self.n, "terminal must sit at layer n"
        assert sum(1 for l in self.layer if l == self.n) == 1, "one terminal only"
        assert all(
            self.layer[u] <= self.layer[u + 1] for u in range(self.num_nodes - 1)
        ), "ids must be topologically ordered by layer"
        reach = {self.root}
        coreach = {self.terminal}
        for u in range(self.num_nodes):
            seen_values = set()
            for a, w in self.children[u]:
                assert 0 <= a < self.domains[self.layer[u]], "edge value outside domain"
                assert a not in seen_values, "duplicate value on outgoing edges"
                seen_values.add(a)
                assert self.layer[w] > self.layer[u], "edges must go down layers"
                if u in reach:
                    reach.add(w)
        for u in range(self.num_nodes - 1, -1, -1):
            if any(w in coreach for _, w in self.children[u]):
                coreach.add(u)
        if self.is_empty:
            assert self.num_edges == 0, "empty diagram may not carry edges"
        else:
            live = reach & coreach
            assert all(u in live for u in range(self.num_nodes)), "dangling node"

    # -- solution view ------------------------------------------------------

    def _layer_choices(self, domains: Sequence[set[int]] | None, layer: int) -> int:
        if domains is None:
            return self.domains[layer]
        return len(domains[layer])

    def count_solutions(self, domains: Sequence[set[int]] | None = None) -> int:
        """Number of solutions; `domains` optionally restricts each layer's
        values (long edges then range over the restricted skipped layers)."""
        cnt = [0] * self.num_nodes
        cnt[self.terminal] = 1
        for u in range(self.num_nodes - 1, -1, -1):
            if u == self.terminal:
                continue
            total = 0
            lu = self.layer[u]
            for a, w in self.children[u]:
                if domains is not None and a not in domains[lu]:
                    continue
                mult = 1
                for j in range(lu + 1, self.layer[w]):
                    mult *= self._layer_choices(domains, j)
                total += mult * cnt[w]
            cnt[u] = total
        return cnt[self.root]

    def enumerate_solutions(
        self, cap: int = 10**6, domains: Sequence[set[int]] | None = None
    ) -> list[tuple[int, ...]]:
        """Solutions as value tuples in model variable order, sorted."""
        if self.count_solutions(domains) > cap:
            raise LimitExceeded(f"solution count exceeds enumeration cap {cap}")
        out = []
        prefix = [0] * self.n

        def rec(u: int, layer: int):
            if layer == self.n:
                values = [0] * self.n
                for t in range(self.n):
                    values[self.var_ids[t]] = prefix[t]
                out.append(tuple(values))
                return
            lu = self.layer[u]
            if layer < lu:  # inside a skipped stretch
                choices = range(self.domains[layer]) if domains is None else sorted(domains[layer])
                for v in choices:
                    prefix[layer] = v
                    rec(u, layer + 1)
                return
            for a, w in self.children[u]:
                if domains is not None and a not in domains[lu]:
                    continue
                prefix[layer] = a
                rec(w, layer + 1)

        if not self.is_empty:
            rec(self.root, 0)
        out.sort()
        return out


def _finalize(
    n: int,
    domains: tuple[int, ...],
    var_ids: tuple[int, ...],
    layer_of: dict,
    edges: dict,
    root_key,
    terminal_key,
    edge_cost: dict | None = None,
) -> Mdd:
    """Renumber an arbitrary-keyed node map into the canonical id order:
    sorted by layer, insertion order within a layer, root first, terminal
    last."""
    keys = list(layer_of)
    keys.sort(key=lambda k: layer_of[k])  # python sort is stable
    ids = {k: i for i, k in enumerate(keys)}
    assert ids[root_key] == 0 and ids[terminal_key] == len(keys) - 1
    layer = [layer_of[k] for k in keys]
    children = [
        sorted((a, ids[w]) for a, w in edges.get(k, ())) for k in keys
    ]
    cost = None
    if edge_cost is not None:
        cost = {(ids[k], a): c for (k, a), c in edge_cost.items()}
    return Mdd(n, domains, var_ids, layer, children, cost)


def empty_mdd(n: int, domains: tuple[int, ...], var_ids: tuple[int, ...]) -> Mdd:
    return Mdd(n, domains, var_ids, [0, n], [[], []])


# ---------------------------------------------------------------------------
# extraction from a compiled BDD
# ---------------------------------------------------------------------------


def traverse(bdd: Bdd, enc: Encoding, u: int, layer: int, value: int) -> int:
    """Follow the bits of `value` through the block of `layer`, stopping at
    the first node outside the block. Takes at most one step per bit."""
    base = enc.offsets[layer]
    end = enc.offsets[layer + 1]
    while u > 1 and base <= bdd.var(u) < end:
        if (value >> (bdd.var(u) - base)) & 1:
            u = bdd.high(u)
        else:
            u = bdd.low(u)
    return u


def extract_mdd(compiled: CompiledBdd) -> Mdd:
    """Group the BDD block by block: layer-i nodes are the BDD nodes first
    entered from an earlier block, and each value's bit path is walked with
    `traverse`. Edges that land several blocks down come out long."""
    bdd, enc = compiled.bdd, compiled.encoding
    n = compiled.n
    domains = enc.domain_sizes
    var_ids = compiled.layer_vars
    if compiled.root == 0:
        return empty_mdd(n, domains, var_ids)

    def layer_of_node(u: int) -> int:
        return n if u == 1 else enc.layer_of_bit(bdd.var(u))

    root_key = (compiled.root, 0)
    terminal_key = (1, n)
    layer_of = {root_key: 0}
    edges: dict[tuple[int, int], list[tuple[int, tuple[int, int]]]] = {}
    per_layer: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
    per_layer[0].append(root_key)
    for i in range(n):
        for key in per_layer[i]:
            u = key[0]
            out = []
            for a in range(domains[i]):
                t = traverse(bdd, enc, u, i, a)
                if t == 0:
                    continue
                t_key = (t, layer_of_node(t))
                if t_key not in layer_of:
                    layer_of[t_key] = t_key[1]
                    per_layer[t_key[1]].append(t_key)
                out.append((a, t_key))
            edges[key] = out
    if terminal_key not in layer_of:  # no satisfying path survived
        return empty_mdd(n, domains, var_ids)
    return _finalize(n, domains, var_ids, layer_of, edges, root_key, terminal_key)


# ---------------------------------------------------------------------------
# structural transforms
# ---------------------------------------------------------------------------


def expand_long_edges(m: Mdd) -> Mdd:
    """Replace each long edge by a chain of full-domain nodes through the
    skipped layers; chains are shared per (target, layer)."""
    assert m.edge_cost is None, "expand priced diagrams before costing, not after"
    layer_of = {}
    edges: dict = {}
    for u in range(m.num_nodes):
        layer_of[("n", u)] = m.layer[u]
    for u in range(m.num_nodes):
        out = []
        lu = m.layer[u]
        for a, w in m.children[u]:
            lw = m.layer[w]
            if lw == lu + 1:
                out.append((a, ("n", w)))
                continue
            for j in range(lu + 1, lw):
                key = ("c", w, j)
                if key not in layer_of:
                    layer_of[key] = j
                    nxt = ("c", w, j + 1) if j + 1 < lw else ("n", w)
                    edges[key] = [(b, nxt) for b in range(m.domains[j])]
            out.append((a, ("c", w, lu + 1)))
        edges[("n", u)] = out
    return _finalize(
        m.n, m.domains, m.var_ids, layer_of, edges, ("n", m.root), ("n", m.terminal)
    )


def merge_isomorphic(m: Mdd) -> Mdd:
    """Collapse nodes with identical outgoing edge sets, bottom-up by layer.
    The result is canonical for the input's solution set given its layer
    structure; running it twice is a fixpoint."""
    assert m.edge_cost is None, "merging ignores prices; merge before costing"
    canon = list(range(m.num_nodes))
    reps_by_layer: dict[int, dict[tuple, int]] = {}
    for u in range(m.num_nodes - 1, -1, -1):
        if u == m.terminal:
            continue
        sig = tuple(sorted((a, canon[w]) for a, w in m.children[u]))
        reps = reps_by_layer.setdefault(m.layer[u], {})
        canon[u] = reps.setdefault(sig, u)
    layer_of = {m.root: 0}
    edges: dict = {}
    stack = [canon[m.root]]
    # the root is always kept as the layer-0 representative
    root_rep = canon[m.root]
    layer_of = {root_rep: 0}
    seen = {root_rep}
    while stack:
        u = stack.pop()
        out = []
        for a, w in m.children[u]:
            r = canon[w]
            if r not in seen:
                seen.add(r)
                layer_of[r] = m.layer[r]
                stack.append(r)
            out.append((a, r))
        edges[u] = out
    if m.terminal not in seen:  # empty diagram: keep the terminal anyway
        layer_of[m.terminal] = m.n
    return _finalize(
        m.n, m.domains, m.var_ids, layer_of, edges, root_rep, m.terminal
    )


def reduce_mdd(m: Mdd) -> Mdd:
    """Remove redundant nodes (full fan of edges to one child), merging
    isomorphic nodes as elimination exposes them; edges through removed
    nodes become long. The root is kept even when redundant so the diagram
    always spans layer 0."""
    assert m.edge_cost is None
    current = merge_isomorphic(m)
    while True:
        redirect = list(range(current.num_nodes))
        changed = False
        for u in range(current.num_nodes - 1, -1, -1):
            if u in (current.root, current.terminal):
                continue
            targets = {redirect[w] for _, w in current.children[u]}
            if len(current.children[u]) == current.domains[current.layer[u]] and len(targets) == 1:
                redirect[u] = targets.pop()
                changed = True
        if not changed:
            return current
        layer_of = {current.root: 0, current.terminal: current.n}
        edges: dict = {}
        stack = [current.root]
        seen = {current.root, current.terminal}
        while stack:
            u = stack.pop()
            out = []
            for a, w in current.children[u]:
                r = redirect[w]
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
                layer_of[r] = current.layer[r]
                out.append((a, r))
            edges[u] = out
        current = _finalize(
            current.n, current.domains, current.var_ids, layer_of, edges,
            current.root, current.terminal,
        )
        current = merge_isomorphic(current)


def restrict(m: Mdd, rho: Assignment) -> Mdd:
    """Keep exactly the solutions extending `rho` (model variable indices).
    Long edges are filtered by their own value layer only; skipped layers
    stay implicit. Runs two linear sweeps (down for reachability, up for
    co-reachability) and drops everything off a surviving path; an empty
    result is returned as the empty diagram, never an error."""
    allowed_value = {}
    for var, value in rho.items():
        layer = m.layer_of_var(var)
        if not 0 <= value < m.domains[layer]:
            raise ModelError(f"value {value} outside domain at layer {layer}")
        allowed_value[layer] = value

    def live(u: int, a: int) -> bool:
        want = allowed_value.get(m.layer[u])
        return want is None or a == want

    reach = [False] * m.num_nodes
    reach[m.root] = True
    for u in range(m.num_nodes):
        if not reach[u]:
            continue
        for a, w in m.children[u]:
            if live(u, a):
                reach[w] = True
    coreach = [False] * m.num_nodes
    coreach[m.terminal] = True
    for u in range(m.num_nodes - 1, -1, -1):
        for a, w in m.children[u]:
            if live(u, a) and coreach[w]:
                coreach[u] = True
                break
    if not (reach[m.terminal] and coreach[m.root]):
        return empty_mdd(m.n, m.domains, m.var_ids)
    layer_of = {m.root: 0}
    edges: dict = {}
    cost = {} if m.edge_cost is not None else None
    for u in range(m.num_nodes):
        if not (reach[u] and coreach[u]):
            continue
        layer_of[u] = m.layer[u]
        out = []
        for a, w in m.children[u]:
            if live(u, a) and reach[w] and coreach[w]:
                out.append((a, w))
                if cost is not None:
                    cost[(u, a)] = m.edge_cost[(u, a)]
        edges[u] = out
    return _finalize(m.n, m.domains, m.var_ids, layer_of, edges, m.root, m.terminal, cost)


def compile_catalogue(
    rows: Iterable[tuple[int, ...]],
    domains: tuple[int, ...],
    var_ids: tuple[int, ...] | None = None,
) -> Mdd:
    """Union of explicit solution rows (a trie), merged into canonical form."""
    n = len(domains)
    if var_ids is None:
        var_ids = tuple(range(n))
    rows = list(rows)
    for row in rows:
        if len(row) != n:
            raise ModelError("catalogue row arity differs from variable count")
        for layer, value in enumerate(row):
            if not 0 <= value < domains[layer]:
                raise ModelError(f"catalogue value {value} outside domain at layer {layer}")
    root_key = ()
    terminal_key = "t"
    layer_of = {root_key: 0, terminal_key: n}
    edges: dict = {root_key: []}
    for row in rows:
        node = root_key
        for layer, value in enumerate(row):
            nxt = row[: layer + 1] if layer < n - 1 else terminal_key
            out = edges.setdefault(node, [])
            if all(a != value for a, _ in out):
                out.append((value, nxt))
                if nxt != terminal_key:
                    layer_of[nxt] = layer + 1
            node = nxt
    if not rows:
        return empty_mdd(n, domains, var_ids)
    trie = _finalize(n, domains, var_ids, layer_of, edges, root_key, terminal_key)
    return merge_isomorphic(trie)


# ---------------------------------------------------------------------------
# flat indexed form
# ---------------------------------------------------------------------------


@dataclass
class IndexedMdd:
    n: int
    domains: tuple[int, ...]
    var_ids: tuple[int, ...]
    num_nodes: int
    node_layer: np.ndarray  # int64 per node
    layer_node_start: np.ndarray  # int64, len n+2: nodes of layer l in [s[l], s[l+1])
    edge_src: np.ndarray  # edges sorted by (src, value)
    edge_dst: np.ndarray
    edge_val: np.ndarray
    edge_layer: np.ndarray
    out_start: np.ndarray  # CSR by source node, len num_nodes+1
    in_start: np.ndarray  # CSR by target node, len num_nodes+1
    in_edges: np.ndarray  # edge indices grouped by target
    edge_layer_start: np.ndarray  # int64, len n+1: layer-l edges in [s[l], s[l+1])
    edge_cost: np.ndarray | None = None  # float64 per edge, when priced

    @property
    def root(self) -> int:
        return 0

    @property
    def terminal(self) -> int:
        return self.num_nodes - 1

    @property
    def num_edges(self) -> int:
        return len(self.edge_src)

    @property
    def is_empty(self) -> bool:
        return self.num_edges == 0

    def max_domain(self) -> int:
        return max(self.domains)


def to_indexed(m: Mdd) -> IndexedMdd:
    """Flatten a diagram without long edges into dense arrays. Node ids are
    already topological (root 0, terminal last); edges come out sorted by
    source then value."""
    if m.has_long_edges():
        raise ModelError("indexed form requires all long edges expanded")
    num_nodes = m.num_nodes
    node_layer = np.asarray(m.layer, dtype=np.int64)
    layer_node_start = np.searchsorted(node_layer, np.arange(m.n + 2)).astype(np.int64)
    srcs, dsts, vals = [], [], []
    costs = [] if m.edge_cost is not None else None
    for u in range(num_nodes):
        for a, w in m.children[u]:  # already sorted by value
            srcs.append(u)
            dsts.append(w)
            vals.append(a)
            if costs is not None:
                costs.append(m.edge_cost[(u, a)])
    edge_src = np.asarray(srcs, dtype=np.int64)
    edge_dst = np.asarray(dsts, dtype=np.int64)
    edge_val = np.asarray(vals, dtype=np.int64)
    edge_layer = node_layer[edge_src] if len(srcs) else np.zeros(0, dtype=np.int64)
    out_start = np.zeros(num_nodes + 1, dtype=np.int64)
    np.add.at(out_start, edge_src + 1, 1)
    out_start = np.cumsum(out_start).astype(np.int64)
    order = np.argsort(edge_dst, kind="stable").astype(np.int64)
    in_start = np.zeros(num_nodes + 1, dtype=np.int64)
    np.add.at(in_start, edge_dst + 1, 1)
    in_start = np.cumsum(in_start).astype(np.int64)
    edge_layer_start = np.searchsorted(edge_layer, np.arange(m.n + 1)).astype(np.int64)
    return IndexedMdd(
        n=m.n,
        domains=m.domains,
        var_ids=m.var_ids,
        num_nodes=num_nodes,
        node_layer=node_layer,
        layer_node_start=layer_node_start,
        edge_src=edge_src,
        edge_dst=edge_dst,
        edge_val=edge_val,
        edge_layer=edge_layer,
        out_start=out_start,
        in_start=in_start,
        in_edges=order,
        edge_layer_start=edge_layer_start,
        edge_cost=np.asarray(costs, dtype=np.float64) if costs is not None else None,
    )


def indexed_to_mdd(im: IndexedMdd) -> Mdd:
    children: list[list[tuple[int, int]]] = [[] for _ in range(im.num_nodes)]
    for e in range(im.num_edges):
        children[int(im.edge_src[e])].append((int(im.edge_val[e]), int(im.edge_dst[e])))
    cost = None
    if im.edge_cost is not None:
        cost = {
            (int(im.edge_src[e]), int(im.edge_val[e])): float(im.edge_cost[e])
            for e in range(im.num_edges)
        }
    return Mdd(im.n, im.domains, im.var_ids, [int(l) for l in im.node_layer], children, cost)


def restrict_indexed(im: IndexedMdd, rho_layers: Mapping[int, int]) -> IndexedMdd | None:
    """Array-form restriction: drop value-incompatible edges, then keep only
    edges on a surviving root-terminal path. Returns None when nothing
    survives."""
    from .kernels import active

    live = np.ones(im.num_edges, dtype=bool)
    for layer, value in rho_layers.items():
        sel = im.edge_layer == layer
        live[sel] = im.edge_val[sel] == value
    node_keep, edge_keep = active().path_filter(
        im.num_nodes, im.edge_layer_start, im.edge_src, im.edge_dst, live
    )
    if not node_keep[im.terminal] or not node_keep[im.root]:
        return None
    new_id = np.cumsum(node_keep, dtype=np.int64) - 1
    num_nodes = int(new_id[-1]) + 1
    e_idx = np.nonzero(edge_keep)[0]
    edge_src = new_id[im.edge_src[e_idx]]
    edge_dst = new_id[im.edge_dst[e_idx]]
    edge_val = im.edge_val[e_idx]
    edge_layer = im.edge_layer[e_idx]
    node_layer = im.node_layer[node_keep.astype(bool)]
    layer_node_start = np.searchsorted(node_layer, np.arange(im.n + 2)).astype(np.int64)
    out_start = np.zeros(num_nodes + 1, dtype=np.int64)
    np.add.at(out_start, edge_src + 1, 1)
    out_start = np.cumsum(out_start).astype(np.int64)
    in_start = np.zeros(num_nodes + 1, dtype=np.int64)
    np.add.at(in_start, edge_dst + 1, 1)
    in_start = np.cumsum(in_start).astype(np.int64)
    in_edges = np.argsort(edge_dst, kind="stable").astype(np.int64)
    edge_layer_start = np.searchsorted(edge_layer, np.arange(im.n + 1)).astype(np.int64)
    return IndexedMdd(
        n=im.n,
        domains=im.domains,
        var_ids=im.var_ids,
        num_nodes=num_nodes,
        node_layer=node_layer,
        layer_node_start=layer_node_start,
        edge_src=edge_src,
        edge_dst=edge_dst,
        edge_val=edge_val,
        edge_layer=edge_layer,
        out_start=out_start,
        in_start=in_start,
        in_edges=in_edges,
        edge_layer_start=edge_layer_start,
        edge_cost=im.edge_cost[e_idx] if im.edge_cost is not None else None,
    )
