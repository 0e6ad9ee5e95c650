"""Several additive integer costs bounded at once.

With two bounds (K1, K2) a node label is no longer one number but the sorted
list of non-dominated (cost1, cost2) prefix pairs: first coordinates
strictly increasing, second strictly decreasing, nothing beyond either
bound. Labeling merges in-edge contributions list by list (linear
two-pointer merges), so a full relabel costs O(edges * K) where
K = min(K1, K2) bounds every list length. A layer value stays valid iff
some edge with that value admits an up-label and a down-label whose sums
respect both bounds; that test is again a linear two-pointer walk.

The k-bound generalization keeps lexicographically sorted tuple lists with
plain scan insertion: correct for any k, quadratic in the (small) list
lengths, used where exactness matters more than speed.

Scaling cost1 down by T = eps * K1 / (n + 1) and flooring turns the
pseudo-polynomial scheme into an approximation with a one-sided guarantee:
nothing within the original bounds is lost, and anything accepted has a
witness within (1 + eps) * K1 on the first cost and K2 exactly on the
second. When T <= 1 scaling cannot shrink anything, so the exact pipeline
runs unchanged, flagged as such.

`equal_split_instance` and `bin_packing_instance` build model families whose
bounded queries answer NP-hard questions; they pin down why relabeling after
a bound relaxation cannot be polynomial in the worst case, and serve as
cross-checks against independent oracles in the tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ModelError
from .mdd import IndexedMdd
from .model import CostSpec, CspModel, parse_model
from .singlecost import layer_cost_tables

COST_SUM_CAP = 1 << 62  # any path sum must stay an exact int64


def int_edge_costs(im: IndexedMdd, cost: CostSpec) -> np.ndarray:
    """Per-edge integer prices for bounded multi-cost work: the spec must be
    unary, integral and non-negative, and path sums must fit int64."""
    if not cost.is_unary:
        raise ModelError(f"cost {cost.name!r}: bounded multi-cost needs unary costs")
    if not cost.is_integral:
        raise ModelError(f"cost {cost.name!r}: bounded multi-cost needs integer costs")
    if not cost.is_nonnegative:
        raise ModelError(f"cost {cost.name!r}: bounded multi-cost needs non-negative costs")
    tables = layer_cost_tables(cost, im.domains, im.var_ids)
    peak = max((float(t.max()) for t in tables if len(t)), default=0.0)
    if peak * max(im.n, 1) > COST_SUM_CAP:
        raise ModelError(f"cost {cost.name!r}: path sums may overflow 64-bit integers")
    if im.num_edges == 0:
        return np.zeros(0, dtype=np.int64)
    grid = np.zeros((im.n, int(max(im.domains))), dtype=np.int64)
    for layer, t in enumerate(tables):
        grid[layer, : len(t)] = t.astype(np.int64)
    return grid[im.edge_layer, im.edge_val]


# ---------------------------------------------------------------------------
# sorted non-dominated pair lists (pure-python mirrors of the kernels)
# ---------------------------------------------------------------------------


def pareto_filter(points: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Canonical non-dominated subset: sorted, first coordinate strictly
    increasing, second strictly decreasing."""
    out: list[tuple[int, int]] = []
    for p in sorted(set(points)):
        # sorted order means out[-1] has c1 <= p's; p survives iff its c2 drops
        if out and out[-1][1] <= p[1]:
            continue
        out.append(p)
    return out


def merge_lists(
    a: Sequence[tuple[int, int]],
    b: Sequence[tuple[int, int]],
    bounds: tuple[int, int] | None = None,
) -> list[tuple[int, int]]:
    """Two-pointer merge of two canonical lists, dropping dominated pairs
    (and anything beyond `bounds` when given)."""
    out: list[tuple[int, int]] = []
    i = j = 0

    def ok(p) -> bool:
        return bounds is None or (p[0] <= bounds[0] and p[1] <= bounds[1])

    while i < len(a) or j < len(b):
        if i < len(a) and not ok(a[i]):
            i += 1
            continue
        if j < len(b) and not ok(b[j]):
            j += 1
            continue
        if i >= len(a) and j >= len(b):
            break
        if j >= len(b) or (i < len(a) and a[i] <= b[j]):
            cand = a[i]
            i += 1
        else:
            cand = b[j]
            j += 1
        if out and out[-1][1] <= cand[1]:
            continue
        out.append(cand)
    return out


def edge_valid(
    up_list: Sequence[tuple[int, int]],
    down_list: Sequence[tuple[int, int]],
    c1: int,
    c2: int,
    k1: int,
    k2: int,
) -> bool:
    """Does some up/down label pair keep both bound sums? For each up label
    the only partner worth checking is the one with the largest first
    coordinate still within K1; walking up labels by rising first coordinate
    slides that partner monotonically, so the test is linear."""
    j = len(down_list) - 1
    for a1, a2 in up_list:
        while j >= 0 and a1 + c1 + down_list[j][0] > k1:
            j -= 1
        if j < 0:
            return False
        if a2 + c2 + down_list[j][1] <= k2:
            return True
    return False


# ---------------------------------------------------------------------------
# two-bound labeling over the flat diagram form
# ---------------------------------------------------------------------------


@dataclass
class BicostLabels:
    up_start: np.ndarray
    up_len: np.ndarray
    up_flat: np.ndarray
    dn_start: np.ndarray
    dn_len: np.ndarray
    dn_flat: np.ndarray
    bounds: tuple[int, int]  # the labels hold every non-dominated pair within these

    def node_up(self, u: int) -> list[tuple[int, int]]:
        s, l = int(self.up_start[u]), int(self.up_len[u])
        return [tuple(map(int, row)) for row in self.up_flat[s : s + l]]

    def node_down(self, u: int) -> list[tuple[int, int]]:
        s, l = int(self.dn_start[u]), int(self.dn_len[u])
        return [tuple(map(int, row)) for row in self.dn_flat[s : s + l]]


def label_bicost(
    im: IndexedMdd, ec1: np.ndarray, ec2: np.ndarray, k1: int, k2: int
) -> BicostLabels:
    from .kernels import active

    b = active()
    us, ul, uf = b.pareto_up(
        im.num_nodes, im.in_start, im.in_edges, im.edge_src, ec1, ec2, int(k1), int(k2)
    )
    ds, dl, df = b.pareto_down(
        im.num_nodes, im.out_start, im.edge_dst, ec1, ec2, int(k1), int(k2)
    )
    return BicostLabels(us, ul, uf, ds, dl, df, (int(k1), int(k2)))


def bicost_frontier(im: IndexedMdd, labels: BicostLabels) -> list[tuple[int, int]]:
    """Non-dominated achievable (cost1, cost2) totals within the label
    bounds: the terminal's up list."""
    return labels.node_up(im.terminal)


def valid_domains_bicost(
    im: IndexedMdd, labels: BicostLabels, ec1: np.ndarray, ec2: np.ndarray, k1: int, k2: int
) -> list[set[int]]:
    """Valid domains at bounds (k1, k2); sound for any bounds at or below
    the bounds the labels were built with."""
    from .kernels import active

    if k1 > labels.bounds[0] or k2 > labels.bounds[1]:
        raise ModelError("bounds exceed what the labels were built for; relabel first")
    if im.is_empty:
        return [set() for _ in range(im.n)]
    mask = active().pareto_domain_mask(
        im.n,
        im.max_domain(),
        im.edge_src,
        im.edge_dst,
        im.edge_val,
        im.edge_layer,
        ec1,
        ec2,
        labels.up_start,
        labels.up_len,
        labels.up_flat,
        labels.dn_start,
        labels.dn_len,
        labels.dn_flat,
        int(k1),
        int(k2),
    )
    return [set(np.nonzero(mask[l])[0].tolist()) for l in range(im.n)]


# ---------------------------------------------------------------------------
# k bounds, exact and simple
# ---------------------------------------------------------------------------


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def kfilter(points: Sequence[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Non-dominated subset, lexicographically sorted; plain scans."""
    out: list[tuple[int, ...]] = []
    for p in sorted(set(points)):
        if any(dominates(q, p) for q in out):
            continue
        out = [q for q in out if not dominates(p, q)]
        out.append(p)
    return sorted(out)


@dataclass
class KcostLabels:
    up: list[list[tuple[int, ...]]]
    down: list[list[tuple[int, ...]]]
    bounds: tuple[int, ...]


def label_kcost(
    im: IndexedMdd, edge_costs: Sequence[np.ndarray], bounds: Sequence[int]
) -> KcostLabels:
    k = len(bounds)
    num = im.num_nodes
    zero = tuple([0] * k)
    up: list[list[tuple[int, ...]]] = [[] for _ in range(num)]
    up[0] = [zero]
    for w in range(1, num):
        cands = []
        for t in range(int(im.in_start[w]), int(im.in_start[w + 1])):
            e = int(im.in_edges[t])
            u = int(im.edge_src[e])
            shift = tuple(int(edge_costs[c][e]) for c in range(k))
            for lab in up[u]:
                cand = tuple(lab[c] + shift[c] for c in range(k))
                if all(cand[c] <= bounds[c] for c in range(k)):
                    cands.append(cand)
        up[w] = kfilter(cands)
    down: list[list[tuple[int, ...]]] = [[] for _ in range(num)]
    down[num - 1] = [zero]
    for u in range(num - 2, -1, -1):
        cands = []
        for e in range(int(im.out_start[u]), int(im.out_start[u + 1])):
            w = int(im.edge_dst[e])
            shift = tuple(int(edge_costs[c][e]) for c in range(k))
            for lab in down[w]:
                cand = tuple(lab[c] + shift[c] for c in range(k))
                if all(cand[c] <= bounds[c] for c in range(k)):
                    cands.append(cand)
        down[u] = kfilter(cands)
    return KcostLabels(up=up, down=down, bounds=tuple(int(b) for b in bounds))


def valid_domains_kcost(
    im: IndexedMdd,
    labels: KcostLabels,
    edge_costs: Sequence[np.ndarray],
    bounds: Sequence[int],
) -> list[set[int]]:
    if any(b > wb for b, wb in zip(bounds, labels.bounds)):
        raise ModelError("bounds exceed what the labels were built for; relabel first")
    k = len(bounds)
    out: list[set[int]] = [set() for _ in range(im.n)]
    for e in range(im.num_edges):
        l, a = int(im.edge_layer[e]), int(im.edge_val[e])
        if a in out[l]:
            continue
        u, w = int(im.edge_src[e]), int(im.edge_dst[e])
        shift = tuple(int(edge_costs[c][e]) for c in range(k))
        hit = False
        for la in labels.up[u]:
            for lb in labels.down[w]:
                if all(la[c] + shift[c] + lb[c] <= bounds[c] for c in range(k)):
                    hit = True
                    break
            if hit:
                break
        if hit:
            out[l].add(a)
    return out


def kcost_frontier(im: IndexedMdd, labels: KcostLabels) -> list[tuple[int, ...]]:
    return list(labels.up[im.terminal])


# ---------------------------------------------------------------------------
# scaling approximation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledCost:
    cost: CostSpec
    bound: int
    scale: Fraction
    exact: bool  # scaling would not shrink anything; inputs returned unchanged


def _scale_factor(k1: int, epsilon: float, n: int) -> Fraction:
    if epsilon <= 0:
        raise ModelError("epsilon must be positive")
    return Fraction(str(float(epsilon))) * k1 / (n + 1)


def scale_costs(cost: CostSpec, k1: int, epsilon: float, n: int | None = None) -> ScaledCost:
    """Floor-divide a unary integer cost by T = epsilon * K1 / (n + 1) and
    ceil the bound. With T <= 1 the division cannot coarsen anything, so the
    original cost and bound come back flagged exact."""
    if not cost.is_unary:
        raise ModelError("scaling applies to unary costs; expand components first")
    if not cost.is_integral or not cost.is_nonnegative:
        raise ModelError("scaling needs non-negative integer costs")
    n_vars = len(cost.unary) if n is None else n
    t = _scale_factor(k1, epsilon, n_vars)
    if k1 <= 0 or t <= 1:
        return ScaledCost(cost=cost, bound=int(k1), scale=t, exact=True)
    unary = tuple(
        tuple(float(math.floor(Fraction(int(c)) / t)) for c in row) for row in cost.unary
    )
    bound = math.ceil(Fraction(int(k1)) / t)
    return ScaledCost(
        cost=CostSpec(name=cost.name, unary=unary, components=()),
        bound=int(bound),
        scale=t,
        exact=False,
    )


def scale_edge_costs(
    ec: np.ndarray, k1: int, epsilon: float, n: int
) -> tuple[np.ndarray, int, Fraction, bool]:
    """Edge-level version of `scale_costs`, for already-priced diagrams."""
    t = _scale_factor(k1, epsilon, n)
    if k1 <= 0 or t <= 1:
        return ec, int(k1), t, True
    scaled = np.array([int(math.floor(Fraction(int(c)) / t)) for c in ec], dtype=np.int64)
    bound = int(math.ceil(Fraction(int(k1)) / t))
    return scaled, bound, t, False


# ---------------------------------------------------------------------------
# hard families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HardInstance:
    model: CspModel
    bounds: tuple[tuple[str, int], ...]  # (cost name, bound)


def equal_split_instance(sizes: Sequence[int]) -> HardInstance:
    """Two booleans per item (goes left / goes right), exactly one of them
    on, each side's load bounded by half the total. Both queried domains are
    non-empty iff the sizes split into two equal-sum halves."""
    total = sum(sizes)
    half = total // 2
    doc = {
        "variables": [],
        "constraints": [],
        "costs": [
            {"name": "left_load", "unary": {}},
            {"name": "right_load", "unary": {}},
        ],
    }
    for i, s in enumerate(sizes):
        a, b = f"item{i}_left", f"item{i}_right"
        doc["variables"].append({"name": a, "domain": ["out", "in"]})
        doc["variables"].append({"name": b, "domain": ["out", "in"]})
        doc["constraints"].append({"type": "expr", "text": f"{a} != {b}"})
        doc["costs"][0]["unary"][a] = {"out": 0, "in": int(s)}
        doc["costs"][1]["unary"][b] = {"out": 0, "in": int(s)}
    model = parse_model(json.dumps(doc))
    return HardInstance(model=model, bounds=(("left_load", half), ("right_load", half)))


def bin_packing_instance(sizes: Sequence[int], bins: int, capacity: int) -> HardInstance:
    """One variable per item choosing its bin; one cost per bin summing the
    sizes placed there, all bounded by the capacity. Domains are non-empty
    iff the items fit."""
    labels = [f"bin{j}" for j in range(1, bins + 1)]
    doc = {
        "variables": [{"name": f"item{i}", "domain": labels} for i in range(len(sizes))],
        "constraints": [],
        "costs": [],
    }
    for j in range(bins):
        unary = {
            f"item{i}": {lab: (int(s) if jj == j else 0) for jj, lab in enumerate(labels)}
            for i, s in enumerate(sizes)
        }
        doc["costs"].append({"name": f"load_bin{j + 1}", "unary": unary})
    model = parse_model(json.dumps(doc))
    return HardInstance(
        model=model,
        bounds=tuple((f"load_bin{j + 1}", int(capacity)) for j in range(bins)),
    )
