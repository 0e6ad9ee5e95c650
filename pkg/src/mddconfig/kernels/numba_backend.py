"""Numba-compiled twins of the numpy kernels.

Same signatures as `numpy_backend`; plain loops that the JIT turns into
tight machine code. Compiled artifacts are cached on disk, so the one-off
compile cost is paid once per machine. A couple of arguments (the per-layer
edge offsets) exist only for the vectorized numpy forms and are ignored
here.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def scalar_labels(num_nodes, edge_layer_start, edge_src, edge_dst, cost):
    up = np.full(num_nodes, np.inf)
    up[0] = 0.0
    for e in range(len(edge_src)):
        v = up[edge_src[e]] + cost[e]
        if v < up[edge_dst[e]]:
            up[edge_dst[e]] = v
    down = np.full(num_nodes, np.inf)
    down[num_nodes - 1] = 0.0
    for e in range(len(edge_src) - 1, -1, -1):
        v = cost[e] + down[edge_dst[e]]
        if v < down[edge_src[e]]:
            down[edge_src[e]] = v
    return up, down


@njit(cache=True)
def scalar_domain_mask(
    n_layers, max_dom, edge_layer, edge_val, edge_src, edge_dst, cost, up, down, bound
):
    mask = np.zeros((n_layers, max_dom), np.bool_)
    for e in range(len(edge_src)):
        if up[edge_src[e]] + cost[e] + down[edge_dst[e]] <= bound:
            mask[edge_layer[e], edge_val[e]] = True
    return mask


@njit(cache=True)
def path_filter(num_nodes, edge_layer_start, edge_src, edge_dst, live):
    num_edges = len(edge_src)
    reach = np.zeros(num_nodes, np.bool_)
    reach[0] = True
    for e in range(num_edges):
        if live[e] and reach[edge_src[e]]:
            reach[edge_dst[e]] = True
    coreach = np.zeros(num_nodes, np.bool_)
    coreach[num_nodes - 1] = True
    for e in range(num_edges - 1, -1, -1):
        if live[e] and coreach[edge_dst[e]]:
            coreach[edge_src[e]] = True
    edge_keep = np.zeros(num_edges, np.bool_)
    for e in range(num_edges):
        edge_keep[e] = live[e] and reach[edge_src[e]] and coreach[edge_dst[e]]
    node_keep = np.zeros(num_nodes, np.bool_)
    for u in range(num_nodes):
        node_keep[u] = reach[u] and coreach[u]
    return node_keep, edge_keep


@njit(cache=True)
def _merge_shift(acc, acc_len, flat, s0, s1, c1, c2, k1, k2, out):
    """Merge acc[:acc_len] with flat[s0:s1] shifted by (c1, c2); both inputs
    sorted with strictly increasing first and decreasing second coordinates.
    Shifted entries beyond either bound are dropped. Returns the merged
    length; result lands in `out`."""
    i = 0
    j = s0
    m = 0
    while True:
        b1 = np.int64(0)
        b2 = np.int64(0)
        have_b = False
        while j < s1:
            b1 = flat[j, 0] + c1
            b2 = flat[j, 1] + c2
            if b1 > k1 or b2 > k2:
                j += 1
            else:
                have_b = True
                break
        have_a = i < acc_len
        if not have_a and not have_b:
            return m
        take_a = False
        if have_a and have_b:
            take_a = acc[i, 0] < b1 or (acc[i, 0] == b1 and acc[i, 1] <= b2)
        elif have_a:
            take_a = True
        if take_a:
            v1 = acc[i, 0]
            v2 = acc[i, 1]
            i += 1
        else:
            v1 = b1
            v2 = b2
            j += 1
        if m > 0 and out[m - 1, 1] <= v2:
            continue  # dominated by the last kept entry
        out[m, 0] = v1
        out[m, 1] = v2
        m += 1


@njit(cache=True)
def pareto_up(num_nodes, in_start, in_edges, edge_src, ec1, ec2, k1, k2):
    seg_start = np.zeros(num_nodes, np.int64)
    seg_len = np.zeros(num_nodes, np.int64)
    flat = np.empty((1024, 2), np.int64)
    flat[0, 0] = 0
    flat[0, 1] = 0
    seg_len[0] = 1
    total = 1
    acc = np.empty((256, 2), np.int64)
    out = np.empty((256, 2), np.int64)
    for w in range(1, num_nodes):
        acc_len = 0
        for t in range(in_start[w], in_start[w + 1]):
            e = in_edges[t]
            u = edge_src[e]
            s0 = seg_start[u]
            s1 = s0 + seg_len[u]
            if s0 == s1:
                continue
            need = acc_len + (s1 - s0)
            if need > out.shape[0]:
                ncap = out.shape[0]
                while ncap < need:
                    ncap *= 2
                out = np.empty((ncap, 2), np.int64)
            acc_len_new = _merge_shift(acc, acc_len, flat, s0, s1, ec1[e], ec2[e], k1, k2, out)
            tmp = acc
            acc = out
            out = tmp
            acc_len = acc_len_new
        if total + acc_len > flat.shape[0]:
            ncap = flat.shape[0]
            while ncap < total + acc_len:
                ncap *= 2
            grown = np.empty((ncap, 2), np.int64)
            grown[:total] = flat[:total]
            flat = grown
        seg_start[w] = total
        seg_len[w] = acc_len
        for r in range(acc_len):
            flat[total + r, 0] = acc[r, 0]
            flat[total + r, 1] = acc[r, 1]
        total += acc_len
    return seg_start, seg_len, flat[:total]


@njit(cache=True)
def pareto_down(num_nodes, out_start, edge_dst, ec1, ec2, k1, k2):
    seg_start = np.zeros(num_nodes, np.int64)
    seg_len = np.zeros(num_nodes, np.int64)
    flat = np.empty((1024, 2), np.int64)
    flat[0, 0] = 0
    flat[0, 1] = 0
    seg_start[num_nodes - 1] = 0
    seg_len[num_nodes - 1] = 1
    total = 1
    acc = np.empty((256, 2), np.int64)
    out = np.empty((256, 2), np.int64)
    for u in range(num_nodes - 2, -1, -1):
        acc_len = 0
        for e in range(out_start[u], out_start[u + 1]):
            w = edge_dst[e]
            s0 = seg_start[w]
            s1 = s0 + seg_len[w]
            if s0 == s1:
                continue
            need = acc_len + (s1 - s0)
            if need > out.shape[0]:
                ncap = out.shape[0]
                while ncap < need:
                    ncap *= 2
                out = np.empty((ncap, 2), np.int64)
            acc_len_new = _merge_shift(acc, acc_len, flat, s0, s1, ec1[e], ec2[e], k1, k2, out)
            tmp = acc
            acc = out
            out = tmp
            acc_len = acc_len_new
        if total + acc_len > flat.shape[0]:
            ncap = flat.shape[0]
            while ncap < total + acc_len:
                ncap *= 2
            grown = np.empty((ncap, 2), np.int64)
            grown[:total] = flat[:total]
            flat = grown
        seg_start[u] = total
        seg_len[u] = acc_len
        for r in range(acc_len):
            flat[total + r, 0] = acc[r, 0]
            flat[total + r, 1] = acc[r, 1]
        total += acc_len
    return seg_start, seg_len, flat[:total]


@njit(cache=True)
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
    mask = np.zeros((n_layers, max_dom), np.bool_)
    for e in range(len(edge_src)):
        l = edge_layer[e]
        v = edge_val[e]
        if mask[l, v]:
            continue
        u = edge_src[e]
        w = edge_dst[e]
        la = up_len[u]
        lb = dn_len[w]
        if la == 0 or lb == 0:
            continue
        a0 = up_start[u]
        b0 = dn_start[w]
        c1 = ec1[e]
        c2 = ec2[e]
        # walk up-labels by rising cost1 while sliding the down pointer to
        # the largest cost1 still within the first bound; its partner has
        # the least cost2 on that side
        j = lb - 1
        for i in range(la):
            a1 = up_flat[a0 + i, 0]
            a2 = up_flat[a0 + i, 1]
            while j >= 0 and a1 + c1 + dn_flat[b0 + j, 0] > k1:
                j -= 1
            if j < 0:
                break
            if a2 + c2 + dn_flat[b0 + j, 1] <= k2:
                mask[l, v] = True
                break
    return mask
