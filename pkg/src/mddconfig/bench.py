"""Query-side benchmark over synthetic diagrams.

Times the operations a session performs per user interaction: restriction,
cheapest-path labeling, bounded valid domains, and (with two costs) the
two-bound variants. A size is a target edge count; the synthetic diagram's
layer count is derived from it (edges grow as layers * width^2). With
`compare_backends=True` every phase runs once per available kernel backend
and rows carry a ``phase@backend`` label. JIT warmup happens before any
timer starts. Row schema: phase, size, avg_ms, max_ms.
"""

from __future__ import annotations

import csv
import statistics
import time
from typing import Sequence

import numpy as np

from . import kernels
from .mdd import restrict_indexed, to_indexed
from .multicost import int_edge_costs, label_bicost, valid_domains_bicost
from .singlecost import edge_cost_array, label_scalar, valid_domains_scalar
from .synth import synthetic_artifact

DEFAULT_WIDTH = 32


def _time(fn, repeat: int) -> tuple[float, float]:
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - t0) * 1000.0)
    return statistics.fmean(samples), max(samples)


def run_benchmark(
    sizes: Sequence[int] = (20_000, 100_000),
    n_costs: int = 1,
    width: int = DEFAULT_WIDTH,
    repeat: int = 5,
    compare_backends: bool = False,
    seed: int = 0,
) -> list[dict]:
    if n_costs not in (1, 2):
        raise ValueError("n_costs must be 1 or 2")
    backends = kernels.available_backends() if compare_backends else [kernels.backend_name()]
    rows: list[dict] = []
    previous = kernels.backend_name()
    try:
        for size in sizes:
            n_layers = max(3, round(int(size) / (width * width)))
            art = synthetic_artifact(n_layers=n_layers, width=width, seed=seed)
            im = to_indexed(art.mdd)
            pin = {n_layers // 2: 0}
            for backend in backends:
                kernels.set_backend(backend)
                kernels.warmup()
                tag = f"@{backend}" if compare_backends else ""

                def row(phase: str, fn):
                    avg, worst = _time(fn, repeat)
                    rows.append(
                        {
                            "phase": phase + tag,
                            "size": int(size),
                            "avg_ms": round(avg, 3),
                            "max_ms": round(worst, 3),
                        }
                    )

                row("restrict", lambda: restrict_indexed(im, pin))
                cur = restrict_indexed(im, pin)
                ec = edge_cost_array(cur, art.model.costs["w"])
                row("label", lambda: label_scalar(cur, ec))
                labels = label_scalar(cur, ec)
                bound = labels.min_cost() + 12.0
                row("domains", lambda: valid_domains_scalar(cur, labels, ec, bound))

                if n_costs == 2:
                    ec1 = int_edge_costs(cur, art.model.costs["w"])
                    ec2 = int_edge_costs(cur, art.model.costs["w2"])
                    k1 = int(label_scalar(cur, np.asarray(ec1, dtype=np.float64)).min_cost()) + 12
                    k2 = int(label_scalar(cur, np.asarray(ec2, dtype=np.float64)).min_cost()) + 12
                    row("label2", lambda: label_bicost(cur, ec1, ec2, k1, k2))
                    blabels = label_bicost(cur, ec1, ec2, k1, k2)
                    row(
                        "domains2",
                        lambda: valid_domains_bicost(cur, blabels, ec1, ec2, k1, k2),
                    )
    finally:
        kernels.set_backend(previous)
    return rows


def write_csv(rows: Sequence[dict], path: str):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["phase", "size", "avg_ms", "max_ms"])
        writer.writeheader()
        writer.writerows(rows)


def format_table(rows: Sequence[dict]) -> str:
    if not rows:
        return ""
    widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) for k in rows[0]}
    lines = ["  ".join(k.ljust(widths[k]) for k in rows[0])]
    for r in rows:
        lines.append("  ".join(str(r[k]).ljust(widths[k]) for k in r))
    return "\n".join(lines)
