"""Reduced ordered binary decision diagrams and the log-encoding of
finite-domain models into them.

The node store is hash-consed: node ids are ints, 0 and 1 are the terminals,
and every internal node (var, low, high) exists at most once with
low != high. `apply_and` / `apply_or` / `negate` are the classic memoized
recursions, so results stay reduced and ordered by construction.

A model variable with domain size d is encoded in ``max(1, ceil(log2 d))``
bits, least significant first: value a sets bit j to ``(a >> j) & 1``. Bits
are clustered per variable, in diagram layer order, and any domain whose size
is not a power of two gets a constraint keeping the encoded value below the
domain size.
"""

from __future__ import annotations

import math
import time
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .errors import LimitExceeded
from .model import CspModel

TERMINAL_VAR = 1 << 30
DEFAULT_NODE_LIMIT = 10**7


class Bdd:
    def __init__(self, node_limit: int = DEFAULT_NODE_LIMIT, debug_checks: bool = False):
        self._var = [TERMINAL_VAR, TERMINAL_VAR]
        self._low = [0, 1]
        self._high = [0, 1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._apply_cache: dict[tuple, int] = {}
        self._neg_cache: dict[int, int] = {}
        self.node_limit = node_limit
        self.debug_checks = debug_checks
        self._deadline: float | None = None

    # -- store ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._var)

    def var(self, u: int) -> int:
        return self._var[u]

    def low(self, u: int) -> int:
        return self._low[u]

    def high(self, u: int) -> int:
        return self._high[u]

    def set_deadline(self, seconds: float | None):
        self._deadline = None if seconds is None else time.monotonic() + seconds

    def mk(self, var: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (var, low, high)
        u = self._unique.get(key)
        if u is not None:
            return u
        if self.debug_checks:
            assert var < self._var[low] and var < self._var[high], "ordering violated"
        if len(self._var) >= self.node_limit + 2:
            raise LimitExceeded(f"node store exceeded limit of {self.node_limit}")
        if self._deadline is not None and len(self._var) % 4096 == 0:
            if time.monotonic() > self._deadline:
                raise LimitExceeded("compile time budget exceeded")
        u = len(self._var)
        self._var.append(var)
        self._low.append(low)
        self._high.append(high)
        self._unique[key] = u
        return u

    def literal(self, var: int, positive: bool) -> int:
        return self.mk(var, 0, 1) if positive else self.mk(var, 1, 0)

    def cube(self, bits: Sequence[tuple[int, int]]) -> int:
        """Conjunction of bit literals, bits as (bit index, 0/1)."""
        node = 1
        for b, v in sorted(bits, reverse=True):
            node = self.mk(b, node, 0) if v == 0 else self.mk(b, 0, node)
        return node

    # -- boolean operations -------------------------------------------------

    def apply_and(self, f: int, g: int) -> int:
        return self._apply("and", f, g)

    def apply_or(self, f: int, g: int) -> int:
        return self._apply("or", f, g)

    def _apply(self, op: str, f: int, g: int) -> int:
        if op == "and":
            if f == 0 or g == 0:
                return 0
            if f == 1:
                return g
            if g == 1 or f == g:
                return f
        else:
            if f == 1 or g == 1:
                return 1
            if f == 0:
                return g
            if g == 0 or f == g:
                return f
        if g < f:  # both ops commute
            f, g = g, f
        key = (op, f, g)
        cached = self._apply_cache.get(key)
        if cached is not None:
            return cached
        vf, vg = self._var[f], self._var[g]
        v = min(vf, vg)
        f0, f1 = (self._low[f], self._high[f]) if vf == v else (f, f)
        g0, g1 = (self._low[g], self._high[g]) if vg == v else (g, g)
        u = self.mk(v, self._apply(op, f0, g0), self._apply(op, f1, g1))
        self._apply_cache[key] = u
        if self.debug_checks:
            self.check_reduced(u)
        return u

    def negate(self, f: int) -> int:
        if f <= 1:
            return 1 - f
        cached = self._neg_cache.get(f)
        if cached is not None:
            return cached
        u = self.mk(self._var[f], self.negate(self._low[f]), self.negate(self._high[f]))
        self._neg_cache[f] = u
        return u

    # -- inspection ---------------------------------------------------------

    def reachable(self, root: int) -> set[int]:
        seen = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            if u <= 1:
                continue
            for child in (self._low[u], self._high[u]):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return seen

    def node_count(self, root: int) -> int:
        """Internal (non-terminal) nodes reachable from root."""
        return sum(1 for u in self.reachable(root) if u > 1)

    def check_reduced(self, root: int):
        """Structural invariants: no redundant node, children below parent,
        store has no duplicates (hash consing makes this a cheap scan)."""
        for u in self.reachable(root):
            if u <= 1:
                continue
            assert self._low[u] != self._high[u], f"redundant node {u}"
            assert self._var[u] < self._var[self._low[u]], f"order violated at {u}"
            assert self._var[u] < self._var[self._high[u]], f"order violated at {u}"

    def satcount(self, root: int, n_bits: int) -> int:
        memo: dict[int, int] = {0: 0, 1: 1}

        def count(u: int) -> int:
            got = memo.get(u)
            if got is not None:
                return got
            vu = self._var[u]
            total = 0
            for child in (self._low[u], self._high[u]):
                vc = min(self._var[child], n_bits)
                total += count(child) << (vc - vu - 1)
            memo[u] = total
            return total

        if root == 0:
            return 0
        shift = min(self._var[root], n_bits)
        return count(root) << shift

    def iter_bit_vectors(self, root: int, n_bits: int) -> Iterator[tuple[int, ...]]:
        """All satisfying assignments over bits 0..n_bits-1; bits skipped by
        the diagram are expanded both ways."""

        def rec(u: int, b: int):
            if u == 0:
                return
            if b == n_bits:
                yield ()
                return
            if self._var[u] > b:
                for rest in rec(u, b + 1):
                    yield (0,) + rest
                    yield (1,) + rest
            else:
                for v, child in ((0, self._low[u]), (1, self._high[u])):
                    for rest in rec(child, b + 1):
                        yield (v,) + rest

        yield from rec(root, 0)


# ---------------------------------------------------------------------------
# log encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Encoding:
    """Bit layout of the clustered per-layer encoding."""

    domain_sizes: tuple[int, ...]  # per layer
    bit_counts: tuple[int, ...]
    offsets: tuple[int, ...]  # offsets[i] = first bit of layer i; offsets[n] = total bits

    @property
    def total_bits(self) -> int:
        return self.offsets[-1]

    def layer_of_bit(self, bit: int) -> int:
        return bisect_right(self.offsets, bit) - 1

    def pos_of_bit(self, bit: int) -> int:
        return bit - self.offsets[self.layer_of_bit(bit)]

    def encode(self, layer: int, value: int) -> tuple[int, ...]:
        return tuple((value >> j) & 1 for j in range(self.bit_counts[layer]))

    def decode(self, layer: int, bits: Sequence[int]) -> int:
        return sum(b << j for j, b in enumerate(bits))


def make_encoding(domain_sizes: Sequence[int]) -> Encoding:
    bit_counts = tuple(max(1, math.ceil(math.log2(d))) for d in domain_sizes)
    offsets = [0]
    for k in bit_counts:
        offsets.append(offsets[-1] + k)
    return Encoding(tuple(domain_sizes), bit_counts, tuple(offsets))


# ---------------------------------------------------------------------------
# model compilation
# ---------------------------------------------------------------------------


@dataclass
class CompiledBdd:
    bdd: Bdd
    root: int
    encoding: Encoding
    layer_vars: tuple[int, ...]  # layer -> model variable index

    @property
    def n(self) -> int:
        return len(self.layer_vars)


def value_cube(bdd: Bdd, enc: Encoding, layer: int, value: int) -> int:
    base = enc.offsets[layer]
    return bdd.cube([(base + j, b) for j, b in enumerate(enc.encode(layer, value))])


def domain_constraint(bdd: Bdd, enc: Encoding, layer: int) -> int:
    """Encoded value must stay below the domain size; vacuous (true) for
    power-of-two domains."""
    d = enc.domain_sizes[layer]
    if d == 1 << enc.bit_counts[layer]:
        return 1
    out = 0
    for a in range(d):
        out = bdd.apply_or(out, value_cube(bdd, enc, layer, a))
    return out


def build_bdd(
    model: CspModel,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_budget: float | None = None,
    debug_checks: bool = False,
) -> CompiledBdd:
    """Conjoin domain constraints (layer order) and then the model's
    constraints (declaration order) over the clustered bit ordering."""
    layer_vars = model.ordering
    layer_of_var = {v: t for t, v in enumerate(layer_vars)}
    enc = make_encoding([model.variables[v].size for v in layer_vars])
    bdd = Bdd(node_limit=node_limit, debug_checks=debug_checks)
    bdd.set_deadline(time_budget)
    try:
        root = 1
        for layer in range(len(layer_vars)):
            root = bdd.apply_and(root, domain_constraint(bdd, enc, layer))
        for constraint in model.constraints:
            rows = constraint.allowed_tuples(model)
            layers = [layer_of_var[v] for v in constraint.scope]
            f = 0
            for row in sorted(rows):
                cube = 1
                for layer, value in sorted(zip(layers, row), reverse=True):
                    cube = bdd.apply_and(value_cube(bdd, enc, layer, value), cube)
                f = bdd.apply_or(f, cube)
            root = bdd.apply_and(root, f)
    finally:
        bdd.set_deadline(None)
    return CompiledBdd(bdd=bdd, root=root, encoding=enc, layer_vars=layer_vars)


def decoded_solutions(compiled: CompiledBdd, cap: int = 10**6) -> list[tuple[int, ...]]:
    """All solutions as value tuples in model variable order, sorted."""
    enc = compiled.encoding
    count = compiled.bdd.satcount(compiled.root, enc.total_bits)
    if count > cap:
        raise LimitExceeded(f"solution count {count} exceeds enumeration cap {cap}")
    n = compiled.n
    out = []
    for bits in compiled.bdd.iter_bit_vectors(compiled.root, enc.total_bits):
        values = [0] * n
        for layer in range(n):
            lo, hi = enc.offsets[layer], enc.offsets[layer + 1]
            values[compiled.layer_vars[layer]] = enc.decode(layer, bits[lo:hi])
        out.append(tuple(values))
    out.sort()
    return out
