import json
from pathlib import Path

import numpy as np
import pytest

from mddconfig import compile_model, parse_catalogue, parse_model
from mddconfig.mdd import restrict_indexed, to_indexed
from mddconfig.model import brute_force_solutions

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def tshirt_model():
    return parse_model((DATA / "tshirt.json").read_text())


@pytest.fixture(scope="session")
def tshirt_artifact(tshirt_model):
    return compile_model(tshirt_model, reduce=True)


@pytest.fixture(scope="session")
def tshirt_catalogue():
    return parse_catalogue((DATA / "tshirt_catalogue.csv").read_text())


@pytest.fixture(scope="session")
def tshirt_doc():
    return json.loads((DATA / "tshirt.json").read_text())


def snapshot_domains(snap: dict) -> dict[str, list[str]]:
    """Valid value labels per variable, from a session snapshot."""
    return {
        v["name"]: [lab for lab, ok in zip(v["domain"], v["valid"]) if ok]
        for v in snap["variables"]
    }


class SolutionOracle:
    """Enumeration-backed answers, computed independently of the diagrams.

    Solutions are enumerated once; every domain query is then a numpy
    filter over the solution rows, which keeps oracle comparisons across
    many (rho, bounds) combinations cheap.
    """

    def __init__(self, model):
        self.model = model
        self.solutions = brute_force_solutions(model)
        self.rows = (
            np.array(self.solutions, dtype=np.int64)
            if self.solutions
            else np.zeros((0, model.n), dtype=np.int64)
        )
        self.costs = {
            name: np.array([spec.evaluate(sol) for sol in self.solutions])
            for name, spec in model.costs.items()
        }

    def valid_domains(self, rho=None, bounds=()) -> list[set[int]]:
        """bounds: iterable of (cost name, K)."""
        mask = np.ones(len(self.rows), dtype=bool)
        for i, v in (rho or {}).items():
            mask &= self.rows[:, i] == v
        for name, k in bounds:
            mask &= self.costs[name] <= k
        kept = self.rows[mask]
        return [set(np.unique(kept[:, i]).tolist()) for i in range(self.model.n)]

    def frontier(self, c1: str, c2: str, k1=None, k2=None) -> list[tuple[int, int]]:
        from mddconfig.multicost import pareto_filter

        pts = []
        for a, b in zip(self.costs[c1], self.costs[c2]):
            if (k1 is None or a <= k1) and (k2 is None or b <= k2):
                pts.append((int(a), int(b)))
        return pareto_filter(pts)


def engine_vd(artifact, rho=None, bounds=()) -> list[set[int]]:
    """Valid domains straight from the kernels (merged engine), in model
    variable order; bounds as (cost name, K) pairs."""
    from mddconfig.multicost import int_edge_costs, label_bicost, valid_domains_bicost
    from mddconfig.singlecost import edge_cost_array, label_scalar, valid_domains_scalar

    model = artifact.model
    im0 = to_indexed(artifact.mdd)
    layer_of = {v: t for t, v in enumerate(im0.var_ids)}
    cur = restrict_indexed(im0, {layer_of[i]: v for i, v in (rho or {}).items()})
    if cur is None:
        return [set() for _ in range(model.n)]
    bounds = list(bounds)
    if not bounds:
        per_layer = [
            set(
                np.unique(
                    cur.edge_val[cur.edge_layer_start[l] : cur.edge_layer_start[l + 1]]
                ).tolist()
            )
            for l in range(cur.n)
        ]
    elif len(bounds) == 1:
        name, k = bounds[0]
        ec = edge_cost_array(cur, model.costs[name])
        labels = label_scalar(cur, ec)
        per_layer = valid_domains_scalar(cur, labels, ec, k)
    elif len(bounds) == 2:
        (n1, k1), (n2, k2) = bounds
        ec1 = int_edge_costs(cur, model.costs[n1])
        ec2 = int_edge_costs(cur, model.costs[n2])
        labels = label_bicost(cur, ec1, ec2, int(k1), int(k2))
        per_layer = valid_domains_bicost(cur, labels, ec1, ec2, int(k1), int(k2))
    else:
        from mddconfig.multicost import label_kcost, valid_domains_kcost

        ecs = [int_edge_costs(cur, model.costs[n]) for n, _ in bounds]
        ks = [int(k) for _, k in bounds]
        labels = label_kcost(cur, ecs, ks)
        per_layer = valid_domains_kcost(cur, labels, ecs, ks)
    out = [set() for _ in range(model.n)]
    for layer, vals in enumerate(per_layer):
        out[im0.var_ids[layer]] = vals
    return out
