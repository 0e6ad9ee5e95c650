"""Pure-numpy reference implementations of the hot loops.

Every function here has a drop-in twin in `numba_backend`; the numpy forms
vectorize layer by layer (edges are sorted by source node, so a layer is a
contiguous slice) and are the fallback when numba is unavailable or switched
off. They are also the ground truth the compiled kernels are tested against.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def scalar_labels(num_nodes, edge_layer_start, edge_src, edge_dst, cost):
    """Cheapest root-to-node (up) and node-to-terminal (down) path costs."""
    up = np.full(num_nodes, np.inf)
    up[0] = 0.0
    for l in range(len(edge_layer_start) - 1):
        s, e = edge_layer_start[l], edge_layer_start[l + 1]
        if s == e:
            continue
        np.minimum.at(up, edge_dst[s:e], up[edge_src[s:e]] + cost[s:e])
    down = np.full(num_nodes, np.inf)
    down[num_nodes - 1] = 0.0
    for l in range(len(edge_layer_start) - 2, -1, -1):
        s, e = edge_layer_start[l], edge_layer_start[l + 1]
        if s == e:
            continue
        np.minimum.at(down, edge_src[s:e], cost[s:e] + down[edge_dst[s:e]])
    return up, down


def scalar_domain_mask(
    n_layers, max_dom, edge_layer, edge_val, edge_src, edge_dst, cost, up, down, bound
):
    """mask[layer, value] is True iff some edge with that value lies on a
    path of total cost within the bound."""
    mask = np.zeros((n_layers, max_dom), dtype=bool)
    if len(edge_src) == 0:
        return mask
    ok = up[edge_src] + cost + down[edge_dst] <= bound
    mask[edge_layer[ok], edge_val[ok]] = True
    return mask


def path_filter(num_nodes, edge_layer_start, edge_src, edge_dst, live):
    """Keep only nodes/edges on a root-terminal path made of live edges."""
    reach = np.zeros(num_nodes, dtype=bool)
    reach[0] = True
    for l in range(len(edge_layer_start) - 1):
        s, e = edge_layer_start[l], edge_layer_start[l + 1]
        if s == e:
            continue
        np.logical_or.at(reach, edge_dst[s:e], reach[edge_src[s:e]] & live[s:e])
    coreach = np.zeros(num_nodes, dtype=bool)
    coreach[num_nodes - 1] = True
    for l in range(len(edge_layer_start) - 2, -1, -1):
        s, e = edge_layer_start[l], edge_layer_start[l + 1]
        if s == e:
            continue
        np.logical_or.at(coreach, edge_src[s:e], coreach[edge_dst[s:e]] & live[s:e])
    edge_keep = live & reach[edge_src] & coreach[edge_dst] if len(edge_src) else live.copy()
    node_keep = reach & coreach
    return node_keep, edge_keep


def _prune(points: np.ndarray) -> np.ndarray:
    """Canonical non-dominated form of integer pairs: first coordinates
    strictly increasing, second strictly decreasing."""
    if len(points) == 0:
        return points.reshape(0, 2)
    order = np.lexsort((points[:, 1], points[:, 0]))
    pts = points[order]
    first = np.ones(len(pts), dtype=bool)
    first[1:] = pts[1:, 0] != pts[:-1, 0]  # min second coord per first coord
    pts = pts[first]
    if len(pts) > 1:
        run = np.minimum.accumulate(pts[:, 1])
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = pts[1:, 1] < run[:-1]
        pts = pts[keep]
    return pts


def _pack(lists):
    num = len(lists)
    seg_start = np.zeros(num, dtype=np.int64)
    seg_len = np.zeros(num, dtype=np.int64)
    total = 0
    for u, seg in enumerate(lists):
        seg_start[u] = total
        seg_len[u] = len(seg)
        total += len(seg)
    flat = np.zeros((total, 2), dtype=np.int64)
    for u, seg in enumerate(lists):
        if len(seg):
            flat[seg_start[u] : seg_start[u] + len(seg)] = seg
    return seg_start, seg_len, flat


def pareto_up(num_nodes, in_start, in_edges, edge_src, ec1, ec2, k1, k2):
    """Per-node sorted non-dominated lists of (cost1, cost2) from the root,
    dropping anything beyond either bound as it appears."""
    empty = np.zeros((0, 2), dtype=np.int64)
    lists = [empty] * num_nodes
    lists[0] = np.zeros((1, 2), dtype=np.int64)
    shift = np.zeros(2, dtype=np.int64)
    for w in range(1, num_nodes):
        parts = []
        for t in range(in_start[w], in_start[w + 1]):
            e = in_edges[t]
            seg = lists[edge_src[e]]
            if len(seg) == 0:
                continue
            shift[0] = ec1[e]
            shift[1] = ec2[e]
            parts.append(seg + shift)
        if not parts:
            continue
        cand = parts[0] if len(parts) == 1 else np.concatenate(parts)
        cand = cand[(cand[:, 0] <= k1) & (cand[:, 1] <= k2)]
        lists[w] = _prune(cand)
    return _pack(lists)


def pareto_down(num_nodes, out_start, edge_dst, ec1, ec2, k1, k2):
    empty = np.zeros((0, 2), dtype=np.int64)
    lists = [empty] * num_nodes
    lists[num_nodes - 1] = np.zeros((1, 2), dtype=np.int64)
    shift = np.zeros(2, dtype=np.int64)
    for u in range(num_nodes - 2, -1, -1):
        parts = []
        for e in range(out_start[u], out_start[u + 1]):
            seg = lists[edge_dst[e]]
            if len(seg) == 0:
                continue
            shift[0] = ec1[e]
            shift[1] = ec2[e]
            parts.append(seg + shift)
        if not parts:
            continue
        cand = parts[0] if len(parts) == 1 else np.concatenate(parts)
        cand = cand[(cand[:, 0] <= k1) & (cand[:, 1] <= k2)]
        lists[u] = _prune(cand)
    return _pack(lists)


def pareto_domain_mask(
    n_layers,
    max_dom,
    edge_src,
    edge_dst,
    edge_val,
    edge_layer,
    ec1,
    ec2,
    up_start,
    up_len,
    up_flat,
    dn_start,
    dn_len,
    dn_flat,
    k1,
    k2,
):
    """mask[layer, value] is True iff some edge with that value admits a
    combination of an up-label and a down-label within both bounds."""
    mask = np.zeros((n_layers, max_dom), dtype=bool)
    for e in range(len(edge_src)):
        if mask[edge_layer[e], edge_val[e]]:
            continue
        u, w = edge_src[e], edge_dst[e]
        la, lb = up_len[u], dn_len[w]
        if la == 0 or lb == 0:
            continue
        a = up_flat[up_start[u] : up_start[u] + la]
        b = dn_flat[dn_start[w] : dn_start[w] + lb]
        # largest feasible b1 per a-row; its b2 is the smallest reachable
        lim = k1 - ec1[e] - a[:, 0]
        idx = np.searchsorted(b[:, 0], lim, side="right") - 1
        rows = idx >= 0
        if not rows.any():
            continue
        if np.any(a[rows, 1] + ec2[e] + b[idx[rows], 1] <= k2):
            mask[edge_layer[e], edge_val[e]] = True
    return mask
