"""Compile pipeline and the on-disk artifact format.

`compile_model` runs the full chain: binary decision diagram over the
clustered bit encoding, block-wise extraction into a layered diagram,
long-edge expansion, isomorphic merge, and (optionally) reduction. Each
phase is timed and its node/edge counts recorded, since those counts are
the primary way to sanity-check a compile against known instances.

An artifact can be saved to a small versioned JSON document and loaded
back; the merged diagram is stored as flat edge columns. The reduced and
array forms are derived on demand and cached, never serialized.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any

from .bdd import DEFAULT_NODE_LIMIT, build_bdd
from .errors import ModelError
from .mdd import (
    IndexedMdd,
    Mdd,
    compile_catalogue,
    expand_long_edges,
    extract_mdd,
    merge_isomorphic,
    reduce_mdd,
    to_indexed,
)
from .model import CatalogueDoc, CspModel, catalogue_to_model, parse_model, serialize_model

FORMAT_VERSION = 1


@dataclass
class CompileStats:
    n_vars: int
    n_constraints: int
    bdd_nodes: int
    bdd_edges: int
    solutions: int
    raw_nodes: int
    raw_edges: int
    expanded_nodes: int
    expanded_edges: int
    merged_nodes: int
    merged_edges: int
    reduced_nodes: int | None = None
    reduced_edges: int | None = None
    timings_ms: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "n_vars": self.n_vars,
            "n_constraints": self.n_constraints,
            "bdd_nodes": self.bdd_nodes,
            "bdd_edges": self.bdd_edges,
            "solutions": self.solutions,
            "raw_nodes": self.raw_nodes,
            "raw_edges": self.raw_edges,
            "expanded_nodes": self.expanded_nodes,
            "expanded_edges": self.expanded_edges,
            "merged_nodes": self.merged_nodes,
            "merged_edges": self.merged_edges,
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
        }
        if self.reduced_nodes is not None:
            out["reduced_nodes"] = self.reduced_nodes
            out["reduced_edges"] = self.reduced_edges
        return out


@dataclass
class Artifact:
    model: CspModel
    mdd: Mdd  # expanded and merged; no long edges
    stats: CompileStats
    _reduced: Mdd | None = field(default=None, repr=False)
    _indexed: IndexedMdd | None = field(default=None, repr=False)

    @property
    def reduced(self) -> Mdd:
        if self._reduced is None:
            self._reduced = reduce_mdd(self.mdd)
        return self._reduced

    @property
    def indexed(self) -> IndexedMdd:
        if self._indexed is None:
            self._indexed = to_indexed(self.mdd)
        return self._indexed


def compile_model(
    model: CspModel,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_budget: float | None = None,
    reduce: bool = False,
) -> Artifact:
    timings: dict[str, float] = {}

    t = time.perf_counter()
    compiled = build_bdd(model, node_limit=node_limit, time_budget=time_budget)
    timings["bdd"] = (time.perf_counter() - t) * 1000.0
    bdd_nodes = compiled.bdd.node_count(compiled.root)
    solutions = compiled.bdd.satcount(compiled.root, compiled.encoding.total_bits)

    t = time.perf_counter()
    raw = extract_mdd(compiled)
    timings["extract"] = (time.perf_counter() - t) * 1000.0

    t = time.perf_counter()
    wide = expand_long_edges(raw)
    timings["expand"] = (time.perf_counter() - t) * 1000.0

    t = time.perf_counter()
    merged = merge_isomorphic(wide)
    timings["merge"] = (time.perf_counter() - t) * 1000.0

    stats = CompileStats(
        n_vars=model.n,
        n_constraints=len(model.constraints),
        bdd_nodes=bdd_nodes,
        bdd_edges=2 * bdd_nodes,  # every internal node carries its two branches
        solutions=solutions,
        raw_nodes=raw.num_nodes,
        raw_edges=raw.num_edges,
        expanded_nodes=wide.num_nodes,
        expanded_edges=wide.num_edges,
        merged_nodes=merged.num_nodes,
        merged_edges=merged.num_edges,
        timings_ms=timings,
    )
    art = Artifact(model=model, mdd=merged, stats=stats)
    if reduce:
        t = time.perf_counter()
        red = reduce_mdd(merged)
        timings["reduce"] = (time.perf_counter() - t) * 1000.0
        stats.reduced_nodes = red.num_nodes
        stats.reduced_edges = red.num_edges
        art._reduced = red
    return art


def compile_catalogue_doc(doc: CatalogueDoc, reduce: bool = False) -> Artifact:
    model = catalogue_to_model(doc)
    timings: dict[str, float] = {}
    t = time.perf_counter()
    rows = [tuple(row[j] for j in model.ordering) for row in doc.rows]
    domains = tuple(model.variables[i].size for i in model.ordering)
    merged = compile_catalogue(rows, domains, var_ids=model.ordering)
    timings["catalogue"] = (time.perf_counter() - t) * 1000.0
    stats = CompileStats(
        n_vars=model.n,
        n_constraints=len(model.constraints),
        bdd_nodes=0,
        bdd_edges=0,
        solutions=merged.count_solutions(),
        raw_nodes=merged.num_nodes,
        raw_edges=merged.num_edges,
        expanded_nodes=merged.num_nodes,
        expanded_edges=merged.num_edges,
        merged_nodes=merged.num_nodes,
        merged_edges=merged.num_edges,
        timings_ms=timings,
    )
    art = Artifact(model=model, mdd=merged, stats=stats)
    if reduce:
        t = time.perf_counter()
        red = reduce_mdd(merged)
        timings["reduce"] = (time.perf_counter() - t) * 1000.0
        stats.reduced_nodes = red.num_nodes
        stats.reduced_edges = red.num_edges
        art._reduced = red
    return art


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def artifact_to_doc(art: Artifact) -> dict:
    m = art.mdd
    edge_src: list[int] = []
    edge_val: list[int] = []
    edge_dst: list[int] = []
    for u in range(m.num_nodes):
        for a, w in m.children[u]:
            edge_src.append(u)
            edge_val.append(a)
            edge_dst.append(w)
    doc: dict = {
        "v": FORMAT_VERSION,
        "kind": "artifact",
        "model": json.loads(serialize_model(art.model)),
        "diagram": {
            "n": m.n,
            "domains": list(m.domains),
            "var_ids": list(m.var_ids),
            "node_layer": list(m.layer),
            "edge_src": edge_src,
            "edge_val": edge_val,
            "edge_dst": edge_dst,
        },
        "stats": art.stats.as_dict(),
    }
    if m.edge_cost is not None:
        doc["diagram"]["edge_cost"] = [
            m.edge_cost[(u, a)] for u, a in zip(edge_src, edge_val)
        ]
    return doc


def artifact_from_doc(doc: dict) -> Artifact:
    if not isinstance(doc, dict) or doc.get("kind") != "artifact":
        raise ModelError("not an artifact document")
    if doc.get("v") != FORMAT_VERSION:
        raise ModelError(f"unsupported artifact version {doc.get('v')!r}")
    model = parse_model(json.dumps(doc["model"]))
    d = doc["diagram"]
    layer = [int(x) for x in d["node_layer"]]
    children: list[list[tuple[int, int]]] = [[] for _ in layer]
    for u, a, w in zip(d["edge_src"], d["edge_val"], d["edge_dst"]):
        children[int(u)].append((int(a), int(w)))
    for ch in children:
        ch.sort()
    cost = None
    if "edge_cost" in d:
        cost = {
            (int(u), int(a)): float(c)
            for u, a, c in zip(d["edge_src"], d["edge_val"], d["edge_cost"])
        }
    m = Mdd(
        int(d["n"]),
        tuple(int(x) for x in d["domains"]),
        tuple(int(x) for x in d["var_ids"]),
        layer,
        children,
        cost,
    )
    s = doc.get("stats", {})
    stats = CompileStats(
        n_vars=int(s.get("n_vars", model.n)),
        n_constraints=int(s.get("n_constraints", len(model.constraints))),
        bdd_nodes=int(s.get("bdd_nodes", 0)),
        bdd_edges=int(s.get("bdd_edges", 0)),
        solutions=int(s.get("solutions", m.count_solutions())),
        raw_nodes=int(s.get("raw_nodes", m.num_nodes)),
        raw_edges=int(s.get("raw_edges", m.num_edges)),
        expanded_nodes=int(s.get("expanded_nodes", m.num_nodes)),
        expanded_edges=int(s.get("expanded_edges", m.num_edges)),
        merged_nodes=int(s.get("merged_nodes", m.num_nodes)),
        merged_edges=int(s.get("merged_edges", m.num_edges)),
        reduced_nodes=s.get("reduced_nodes"),
        reduced_edges=s.get("reduced_edges"),
        timings_ms=dict(s.get("timings_ms", {})),
    )
    return Artifact(model=model, mdd=m, stats=stats)


def save_artifact(art: Artifact, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(artifact_to_doc(art), fh)


def load_artifact(path: str) -> Artifact:
    with open(path, "r", encoding="utf-8") as fh:
        return artifact_from_doc(json.load(fh))
