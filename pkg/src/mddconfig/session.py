"""Interactive sessions over a compiled artifact.

A session holds a pristine diagram and a current assignment. Every assign
or unassign re-restricts from pristine (restriction is cheap and never
accumulates error) and eagerly relabels, so each snapshot's valid domains
already reflect the new state and choosing from them never dead-ends.

Bound changes follow a watermark: labels are built at some bounds and stay
sound for any query at or below them, so tightening answers directly from
the existing labels. A relabel happens only when some bound rises above
the bounds in force at the last relabel. The `relabeled` flag reports what
the last operation did; `relabels` counts label rebuilds over the session's
lifetime, which is the interesting cost driver since a relabel touches
every edge.

Engines: "merged" runs the array kernels over the expanded, merged
diagram; "reduced" runs the pure-python long-edge engine over the reduced
diagram (plain and single-cost modes only, unary costs only).

Assigning a value outside the current valid domain is allowed; the session
enters a dead end (empty domains, flag raised) and recovers as soon as the
offending value is unassigned.
"""

from __future__ import annotations

import math
import time
from typing import Mapping, Sequence

import numpy as np

from .artifact import Artifact
from .errors import QueryError, TransitionError
from .mdd import Mdd, IndexedMdd, restrict, restrict_indexed, to_indexed
from .model import CostSpec
from .multicost import (
    bicost_frontier,
    int_edge_costs,
    kcost_frontier,
    label_bicost,
    label_kcost,
    scale_costs,
    valid_domains_bicost,
    valid_domains_kcost,
)
from .singlecost import (
    edge_cost_array,
    label_long,
    label_scalar,
    layer_cost_tables,
    valid_domains_long,
    valid_domains_scalar,
)

MODES = ("plain", "single", "bicost", "kcost", "bicost-approx")
ENGINES = ("merged", "reduced")
SNAPSHOT_VERSION = 1


class Session:
    def __init__(
        self,
        artifact: Artifact,
        mode: str = "plain",
        engine: str = "merged",
        costs: Sequence[str] = (),
        bounds: Sequence[float] = (),
        epsilon: float | None = None,
    ):
        if mode not in MODES:
            raise QueryError(f"unknown mode {mode!r}")
        if engine not in ENGINES:
            raise QueryError(f"unknown engine {engine!r}")
        need = {"plain": 0, "single": 1, "bicost": 2, "bicost-approx": 2}.get(mode)
        if need is not None and len(costs) != need:
            raise QueryError(f"mode {mode!r} takes exactly {need} cost(s)")
        if mode == "kcost" and len(costs) < 1:
            raise QueryError("mode 'kcost' takes at least one cost")
        if len(bounds) != len(costs):
            raise QueryError("one bound per cost")
        if mode == "bicost-approx":
            if epsilon is None or epsilon <= 0:
                raise QueryError("mode 'bicost-approx' needs a positive epsilon")
        elif epsilon is not None:
            raise QueryError("epsilon only applies to mode 'bicost-approx'")
        if engine == "reduced" and mode not in ("plain", "single"):
            raise QueryError("engine 'reduced' supports modes 'plain' and 'single'")
        if artifact.mdd.is_empty:
            raise QueryError("artifact has no solutions; nothing to configure")

        self.artifact = artifact
        self.model = artifact.model
        self.mode = mode
        self.engine = engine
        self.epsilon = float(epsilon) if epsilon is not None else None
        self.cost_names = tuple(costs)
        self.specs: list[CostSpec] = []
        for name in costs:
            if name not in self.model.costs:
                raise QueryError(f"unknown cost {name!r}")
            self.specs.append(self.model.costs[name])
        self.bounds = [float(b) if mode == "single" else int(b) for b in bounds]
        if mode in ("bicost", "kcost", "bicost-approx"):
            for b in self.bounds:
                if b < 0:
                    raise QueryError("bounds must be non-negative")

        # pristine structures, never mutated after this point
        self._m0: Mdd | None = None
        self._im0: IndexedMdd | None = None
        self._tables0 = None
        if engine == "reduced":
            m0 = artifact.reduced
            for spec in self.specs:
                if not spec.is_unary:
                    raise QueryError("engine 'reduced' needs unary costs")
            self._m0 = m0
            self._tables0 = [
                layer_cost_tables(spec, m0.domains, m0.var_ids) for spec in self.specs
            ]
        else:
            base = artifact.mdd
            self._priced = False
            if mode == "single" and not self.specs[0].is_unary:
                from .singlecost import expand_costs

                base = expand_costs(base, self.specs[0])
                self._priced = True
            self._im0 = to_indexed(base)

        self.rho: dict[int, int] = {}  # model variable -> value index
        self.watermark = list(self.bounds)
        self.relabels = 0
        self._last: dict = {}
        self._recompute(relabel=True, op_relabeled=False, count_relabel=False)

    # -- public operations --------------------------------------------------

    def assign(self, name: str, value) -> dict:
        t0 = time.perf_counter()
        i = self.model.var_index(name)
        if i in self.rho:
            raise TransitionError(f"variable {name!r} is already assigned")
        v = self.model.variables[i].value_of(value)
        self.rho[i] = v
        self._recompute(relabel=True, op_relabeled=True, elapsed_from=t0)
        return self.snapshot()

    def unassign(self, name: str) -> dict:
        t0 = time.perf_counter()
        i = self.model.var_index(name)
        if i not in self.rho:
            raise TransitionError(f"variable {name!r} is not assigned")
        del self.rho[i]
        self._recompute(relabel=True, op_relabeled=True, elapsed_from=t0)
        return self.snapshot()

    def set_bounds(self, updates: Mapping[str, float]) -> dict:
        t0 = time.perf_counter()
        if self.mode == "plain":
            raise QueryError("mode 'plain' has no bounds")
        new = list(self.bounds)
        for name, value in updates.items():
            if name not in self.cost_names:
                raise QueryError(f"cost {name!r} is not part of this session")
            k = self.cost_names.index(name)
            new[k] = float(value) if self.mode == "single" else int(value)
            if self.mode != "single" and new[k] < 0:
                raise QueryError("bounds must be non-negative")
        relabel = any(nb > wb for nb, wb in zip(new, self.watermark))
        if self.mode == "bicost-approx" and new[0] != self.bounds[0]:
            # the scaling factor is derived from the first bound, so any
            # change to it invalidates the scaled labels
            relabel = True
        self.bounds = new
        self._recompute(relabel=relabel, op_relabeled=relabel, elapsed_from=t0)
        return self.snapshot()

    def snapshot(self) -> dict:
        return dict(self._last)

    def frontier(self) -> list:
        if self.mode not in ("bicost", "kcost", "bicost-approx"):
            raise QueryError(f"mode {self.mode!r} has no cost frontier")
        return list(self._last["frontier"])

    def count_solutions(self) -> int:
        """Solutions compatible with the assignment alone (bounds ignored).
        Exact big-integer arithmetic; not meant for the hot path."""
        cur = self._cur_mdd()
        return 0 if cur is None else cur.count_solutions()

    # -- internals ------------------------------------------------------------

    def _cur_mdd(self) -> Mdd | None:
        if self.engine == "reduced":
            return self._m
        if self._im is None:
            return None
        from .mdd import indexed_to_mdd

        return indexed_to_mdd(self._im)

    def _rho_layers(self, var_ids: Sequence[int]) -> dict[int, int]:
        layer_of = {v: t for t, v in enumerate(var_ids)}
        return {layer_of[i]: v for i, v in self.rho.items()}

    def _recompute(
        self,
        relabel: bool,
        op_relabeled: bool,
        elapsed_from: float | None = None,
        count_relabel: bool = True,
    ):
        t0 = time.perf_counter() if elapsed_from is None else elapsed_from
        if self.engine == "reduced":
            self._m = restrict(self._m0, self.rho)
        else:
            self._im = restrict_indexed(self._im0, self._rho_layers(self._im0.var_ids))
        if relabel:
            self._build_labels()
            self.watermark = list(self.bounds)
            if count_relabel:
                self.relabels += 1
        vd = self._valid_domains()
        self._last = self._make_snapshot(vd, op_relabeled)
        self._last["elapsed_ms"] = (time.perf_counter() - t0) * 1000.0

    def _build_labels(self):
        self._labels = None
        self._ecs: list[np.ndarray] = []
        if self.engine == "reduced":
            if self._m.is_empty:
                return
            rl = self._rho_layers(self._m0.var_ids)
            if self.mode == "single":
                self._labels = label_long(self._m, self._tables0[0], rl)
            return
        im = self._im
        if im is None:
            return
        if self.mode == "single":
            if self._priced:
                self._ecs = [im.edge_cost]
            else:
                self._ecs = [edge_cost_array(im, self.specs[0])]
            self._labels = label_scalar(im, self._ecs[0])
        elif self.mode == "bicost":
            self._ecs = [int_edge_costs(im, s) for s in self.specs]
            self._labels = label_bicost(
                im, self._ecs[0], self._ecs[1], self.bounds[0], self.bounds[1]
            )
        elif self.mode == "bicost-approx":
            scaled = scale_costs(self.specs[0], int(self.bounds[0]), self.epsilon, self.model.n)
            self._scaled = scaled
            self._ecs = [int_edge_costs(im, scaled.cost), int_edge_costs(im, self.specs[1])]
            self._labels = label_bicost(
                im, self._ecs[0], self._ecs[1], scaled.bound, self.bounds[1]
            )
        elif self.mode == "kcost":
            self._ecs = [int_edge_costs(im, s) for s in self.specs]
            self._labels = label_kcost(im, self._ecs, [int(b) for b in self.bounds])

    def _scaled_bound(self, k1: int) -> int:
        if self._scaled.exact:
            return int(k1)
        return int(math.ceil(k1 / self._scaled.scale))

    def _valid_domains(self) -> list[set[int]]:
        n = self.model.n
        if self.engine == "reduced":
            m = self._m
            if m.is_empty:
                return [set() for _ in range(n)]
            rl = self._rho_layers(self._m0.var_ids)
            if self.mode == "plain":
                per_layer = self._plain_domains_long(m, rl)
            else:
                per_layer = valid_domains_long(m, self._labels, self.bounds[0], rl)
            return self._to_var_order(per_layer, self._m0.var_ids)
        im = self._im
        if im is None:
            return [set() for _ in range(n)]
        if self.mode == "plain":
            per_layer = [
                set(
                    np.unique(
                        im.edge_val[im.edge_layer_start[l] : im.edge_layer_start[l + 1]]
                    ).tolist()
                )
                for l in range(n)
            ]
        elif self.mode == "single":
            per_layer = valid_domains_scalar(im, self._labels, self._ecs[0], self.bounds[0])
        elif self.mode == "bicost":
            per_layer = valid_domains_bicost(
                im, self._labels, self._ecs[0], self._ecs[1], self.bounds[0], self.bounds[1]
            )
        elif self.mode == "bicost-approx":
            per_layer = valid_domains_bicost(
                im,
                self._labels,
                self._ecs[0],
                self._ecs[1],
                self._scaled_bound(int(self.bounds[0])),
                self.bounds[1],
            )
        else:
            per_layer = valid_domains_kcost(
                im, self._labels, self._ecs, [int(b) for b in self.bounds]
            )
        return self._to_var_order(per_layer, im.var_ids)

    def _plain_domains_long(self, m: Mdd, rho_layers: Mapping[int, int]) -> list[set[int]]:
        out: list[set[int]] = [set() for _ in range(m.n)]
        for u in range(m.num_nodes):
            lu = m.layer[u]
            for a, w in m.children[u]:
                out[lu].add(a)
                for j in range(lu + 1, m.layer[w]):
                    if j in rho_layers:
                        out[j].add(rho_layers[j])
                    else:
                        out[j].update(range(m.domains[j]))
        return out

    def _to_var_order(self, per_layer: list[set[int]], var_ids: Sequence[int]) -> list[set[int]]:
        out: list[set[int]] = [set() for _ in range(self.model.n)]
        for layer, vals in enumerate(per_layer):
            if layer < len(var_ids):
                out[var_ids[layer]] = vals
        return out

    def _min_costs(self) -> dict[str, float | None]:
        out: dict[str, float | None] = {}
        if not self.specs:
            return out
        if self.engine == "reduced":
            m = self._m
            rl = self._rho_layers(self._m0.var_ids)
            for spec, tables in zip(self.specs, self._tables0):
                if m.is_empty:
                    out[spec.name] = None
                    continue
                lab = (
                    self._labels
                    if self.mode == "single"
                    else label_long(m, tables, rl)
                )
                v = lab.up[m.terminal]
                out[spec.name] = None if v == math.inf else float(v)
            return out
        im = self._im
        for k, spec in enumerate(self.specs):
            if im is None:
                out[spec.name] = None
                continue
            if self.mode == "single":
                ec = self._ecs[0]
            elif k < len(self._ecs) and self.mode != "bicost-approx":
                ec = self._ecs[k]
            elif self.mode == "bicost-approx" and k == 1:
                ec = self._ecs[1]
            else:
                ec = int_edge_costs(im, spec)
            v = label_scalar(im, np.asarray(ec, dtype=np.float64)).min_cost()
            out[spec.name] = None if v == math.inf else float(v)
        return out

    def _dead_end(self) -> bool:
        if self.engine == "reduced":
            if self._m.is_empty:
                return True
            if self.mode == "single":
                return bool(self._labels.up[self._m.terminal] > self.bounds[0])
            return False
        im = self._im
        if im is None:
            return True
        if self.mode == "plain":
            return False
        if self.mode == "single":
            return bool(self._labels.min_cost() > self.bounds[0])
        if self.mode in ("bicost", "bicost-approx"):
            k1 = (
                self._scaled_bound(int(self.bounds[0]))
                if self.mode == "bicost-approx"
                else int(self.bounds[0])
            )
            pairs = self._labels.node_up(im.terminal)
            return not any(p[0] <= k1 and p[1] <= self.bounds[1] for p in pairs)
        labs = self._labels.up[im.terminal]
        return not any(
            all(t[c] <= self.bounds[c] for c in range(len(self.bounds))) for t in labs
        )

    def _frontier(self) -> list:
        im = self._im
        if im is None:
            return []
        if self.mode in ("bicost", "bicost-approx"):
            pairs = bicost_frontier(im, self._labels)
            k1 = (
                self._scaled_bound(int(self.bounds[0]))
                if self.mode == "bicost-approx"
                else int(self.bounds[0])
            )
            keep = [p for p in pairs if p[0] <= k1 and p[1] <= self.bounds[1]]
            from .multicost import pareto_filter

            return pareto_filter(keep)
        if self.mode == "kcost":
            from .multicost import kfilter

            return kfilter(
                [
                    t
                    for t in kcost_frontier(im, self._labels)
                    if all(t[c] <= self.bounds[c] for c in range(len(self.bounds)))
                ]
            )
        return []

    def _make_snapshot(self, vd: list[set[int]], op_relabeled: bool) -> dict:
        variables = []
        for i, var in enumerate(self.model.variables):
            variables.append(
                {
                    "name": var.name,
                    "domain": list(var.labels),
                    "assigned": var.labels[self.rho[i]] if i in self.rho else None,
                    "valid": [v in vd[i] for v in range(var.size)],
                }
            )
        snap: dict = {
            "v": SNAPSHOT_VERSION,
            "mode": self.mode,
            "engine": self.engine,
            "variables": variables,
            "dead_end": self._dead_end(),
            "relabeled": op_relabeled,
        }
        if self.specs:
            snap["bounds"] = {name: b for name, b in zip(self.cost_names, self.bounds)}
            snap["min_costs"] = self._min_costs()
        if self.mode in ("bicost", "kcost", "bicost-approx"):
            snap["frontier"] = [list(t) for t in self._frontier()]
        if self.mode == "bicost-approx":
            snap["scale"] = float(self._scaled.scale)
            snap["exact"] = self._scaled.exact
        return snap


def canonical_snapshot(snap: Mapping) -> dict:
    """Snapshot without the per-operation metadata (timing, relabel flag):
    the pure state, compared for equality in round-trip checks."""
    out = dict(snap)
    out.pop("elapsed_ms", None)
    out.pop("relabeled", None)
    return out
