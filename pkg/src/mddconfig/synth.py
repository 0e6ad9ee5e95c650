"""Deterministic generators for testing and benchmarking.

`random_model` produces small solvable-by-brute-force models through the
public parser, so generated instances exercise exactly the same code path
as user input. `synthetic_artifact` skips compilation entirely and builds
a large layered diagram directly; benchmarks and scale checks need edge
counts that small random models cannot reach.
"""

from __future__ import annotations

import json
import random

from .artifact import Artifact, CompileStats
from .mdd import Mdd
from .model import CspModel, parse_model

_COMPARATORS = ("!=", "<", "<=", "=")


def random_model(
    seed: int,
    n_vars: int | None = None,
    max_domain: int = 4,
    n_costs: int = 1,
    cost_range: tuple[int, int] = (0, 5),
    max_constraints: int | None = None,
) -> CspModel:
    rng = random.Random(seed)
    n = n_vars if n_vars is not None else rng.randint(3, 6)
    doc: dict = {"variables": [], "constraints": [], "costs": []}
    sizes = []
    for i in range(n):
        d = rng.randint(2, max_domain)
        sizes.append(d)
        doc["variables"].append({"name": f"v{i}", "domain": [f"a{j}" for j in range(d)]})
    cap = max_constraints if max_constraints is not None else max(2, n - 1)
    n_cons = rng.randint(1, cap)
    for _ in range(n_cons):
        i, j = rng.sample(range(n), 2)
        if rng.random() < 0.7:
            op = rng.choice(_COMPARATORS)
            doc["constraints"].append({"type": "expr", "text": f"v{i} {op} v{j}"})
        else:
            # random table over a two-variable scope, never empty
            pairs = [
                (a, b)
                for a in range(sizes[i])
                for b in range(sizes[j])
                if rng.random() < 0.6
            ]
            if not pairs:
                pairs = [(0, 0)]
            doc["constraints"].append(
                {
                    "type": "table",
                    "scope": [f"v{i}", f"v{j}"],
                    "tuples": [[f"a{a}", f"a{b}"] for a, b in pairs],
                }
            )
    lo, hi = cost_range
    for c in range(n_costs):
        unary = {
            f"v{i}": {f"a{j}": rng.randint(lo, hi) for j in range(sizes[i])}
            for i in range(n)
        }
        doc["costs"].append({"name": f"cost{c}", "unary": unary})
    return parse_model(json.dumps(doc))


def synthetic_artifact(
    n_layers: int = 100, width: int = 32, seed: int = 0
) -> Artifact:
    """A dense layered diagram (about n_layers * width**2 edges) wrapped as
    a compiled artifact: every internal node carries one edge per domain
    value, targets spread pseudo-randomly, value 0 always goes straight
    across so every node stays reachable. Costs come from one unary spec."""
    rng = random.Random(seed)
    dom = width  # full coverage of the next layer needs domain >= width
    doc: dict = {
        "variables": [
            {"name": f"v{i}", "domain": [f"a{j}" for j in range(dom)]}
            for i in range(n_layers)
        ],
        "constraints": [],
        "costs": [
            {
                "name": "w",
                "unary": {
                    f"v{i}": {f"a{j}": rng.randint(0, 9) for j in range(dom)}
                    for i in range(n_layers)
                },
            },
            {
                "name": "w2",
                "unary": {
                    f"v{i}": {f"a{j}": rng.randint(0, 9) for j in range(dom)}
                    for i in range(n_layers)
                },
            },
        ],
    }
    model = parse_model(json.dumps(doc))

    layer: list[int] = [0]
    children: list[list[tuple[int, int]]] = [[]]
    ids: list[list[int]] = [[0]]
    for l in range(1, n_layers):
        ids.append([len(layer) + j for j in range(width)])
        layer.extend([l] * width)
        children.extend([[] for _ in range(width)])
    terminal = len(layer)
    layer.append(n_layers)
    children.append([])
    for l in range(n_layers):
        nxt = ids[l + 1] if l + 1 < n_layers else [terminal]
        for j, u in enumerate(ids[l]):
            shift = rng.randrange(len(nxt))
            for a in range(dom):
                if l == 0:
                    t = nxt[a % len(nxt)]  # root fans out to every column
                elif a == 0:
                    t = nxt[j % len(nxt)]  # straight across, keeps column j alive
                else:
                    t = nxt[(j + a + shift) % len(nxt)]
                children[u].append((a, t))
    m = Mdd(n_layers, tuple([dom] * n_layers), tuple(range(n_layers)), layer, children)
    stats = CompileStats(
        n_vars=n_layers,
        n_constraints=0,
        bdd_nodes=0,
        bdd_edges=0,
        solutions=m.count_solutions(),
        raw_nodes=m.num_nodes,
        raw_edges=m.num_edges,
        expanded_nodes=m.num_nodes,
        expanded_edges=m.num_edges,
        merged_nodes=m.num_nodes,
        merged_edges=m.num_edges,
    )
    return Artifact(model=model, mdd=m, stats=stats)
