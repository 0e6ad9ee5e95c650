"""Command-line front door.

compile  parse a model (JSON) or catalogue (CSV), compile, save the artifact
query    load an artifact, apply assignments and cost bounds, print domains
verify   cross-check engine answers against brute-force enumeration
bench    time the per-interaction phases on synthetic diagrams
serve    run the HTTP service

Exit codes: 0 ok, 1 parse/input error, 2 resource limit, 3 query error,
4 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

from .artifact import compile_catalogue_doc, compile_model, load_artifact, save_artifact
from .errors import LimitExceeded, ModelError, QueryError
from .model import brute_force_vd, parse_catalogue, parse_model
from .session import Session

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_RESOURCE = 2
EXIT_QUERY = 3
EXIT_MISMATCH = 4


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc.strerror}") from None


def _load_model_or_catalogue(path: str):
    """A model file is JSON; anything else is tried as a catalogue."""
    text = _read_text(path)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_model(text), None
    doc = parse_catalogue(text)
    return None, doc


def _cmd_compile(args) -> int:
    model, doc = _load_model_or_catalogue(args.model_file)
    if doc is not None:
        art = compile_catalogue_doc(doc, reduce=True)
    else:
        from .bdd import DEFAULT_NODE_LIMIT

        art = compile_model(
            model,
            node_limit=args.node_limit or DEFAULT_NODE_LIMIT,
            time_budget=args.time_budget,
            reduce=True,
        )
    if args.output:
        save_artifact(art, args.output)
    s = art.stats
    if args.stats:
        print(f"bdd nodes/edges:      {s.bdd_nodes} / {s.bdd_edges}")
        print(f"diagram nodes/edges:  {s.merged_nodes} / {s.merged_edges}")
        print(f"reduced nodes/edges:  {s.reduced_nodes} / {s.reduced_edges}")
        print(f"solutions:            {s.solutions}")
        phases = " ".join(f"{k}={v:.1f}" for k, v in s.timings_ms.items())
        print(f"phase ms:             {phases}")
    else:
        dest = f" -> {args.output}" if args.output else ""
        print(
            f"compiled: {s.solutions} solutions, "
            f"{s.merged_nodes} nodes, {s.merged_edges} edges{dest}"
        )
    return EXIT_OK


def _parse_assigns(pairs: list[str]) -> list[tuple[str, str]]:
    out = []
    for pair in pairs:
        if "=" not in pair:
            raise QueryError(f"--assign wants name=value, got {pair!r}")
        name, _, value = pair.partition("=")
        out.append((name.strip(), value.strip()))
    return out


def _session_for_query(art, args) -> Session:
    names = args.cost or []
    maxima = args.max or []
    if len(names) != len(maxima):
        raise QueryError("each --cost needs a matching --max")
    if not names:
        mode = "plain"
        if args.epsilon is not None:
            raise QueryError("--epsilon needs two costs")
    elif len(names) == 1:
        mode = "single"
    elif len(names) == 2:
        mode = "bicost-approx" if args.epsilon is not None else "bicost"
    else:
        mode = "kcost"
    return Session(
        art,
        mode=mode,
        costs=names,
        bounds=[float(k) for k in maxima],
        epsilon=args.epsilon,
    )


def _print_snapshot(snap: dict):
    for entry in snap["variables"]:
        valid = [lab for lab, ok in zip(entry["domain"], entry["valid"]) if ok]
        suffix = f"  (assigned: {entry['assigned']})" if entry["assigned"] is not None else ""
        print(f"{entry['name']}: {' '.join(valid) if valid else '-'}{suffix}")
    if "min_costs" in snap:
        parts = ", ".join(
            f"{k}={v if v is not None else 'unreachable'}"
            for k, v in sorted(snap["min_costs"].items())
        )
        print(f"min costs: {parts}")
    if "frontier" in snap:
        pts = " ".join("(" + ",".join(str(c) for c in p) + ")" for p in snap["frontier"])
        print(f"frontier: {pts}")
    if snap.get("dead_end"):
        print("dead end: no solution satisfies the current assignment and bounds")


def _cmd_query(args) -> int:
    art = load_artifact(args.mdd_file)
    session = _session_for_query(art, args)
    for name, value in _parse_assigns(args.assign or []):
        session.assign(name, value)
    _print_snapshot(session.snapshot())
    if args.marginals:
        _print_marginals(art, session, args.marginals)
    return EXIT_OK


def _print_marginals(art, session: Session, ring_name: str):
    from .mdd import to_indexed
    from .singlecost import SEMIRINGS, semiring_labels, weights_from_tables, layer_cost_tables

    if ring_name not in SEMIRINGS:
        raise QueryError(f"unknown semiring {ring_name!r}; have {sorted(SEMIRINGS)}")
    ring = SEMIRINGS[ring_name]
    cur = session._cur_mdd()
    if cur is None or cur.is_empty:
        print(f"total ({ring_name}): {ring.zero}")
        return
    im = to_indexed(cur)
    if ring_name == "count":
        weights = [1] * im.num_edges
    elif session.specs:
        tables = layer_cost_tables(session.specs[0], im.domains, im.var_ids)
        weights = weights_from_tables(im, tables)
    else:
        weights = [ring.one] * im.num_edges
    res = semiring_labels(im, ring, weights)
    print(f"total ({ring_name}): {res.total}")
    names = {i: v for i, v in enumerate(art.model.variables)}
    for layer, var_id in enumerate(im.var_ids):
        var = names[var_id]
        for a in range(im.domains[layer]):
            print(f"marginal {var.name}={var.labels[a]}: {res.marginals[layer][a]}")


def _verify_one(model, mutate: str | None, rng) -> list[str]:
    """Compare engine answers with enumeration on one model. Returns a list
    of mismatch descriptions (empty = clean)."""
    from .mdd import restrict_indexed
    from .multicost import int_edge_costs, label_bicost, valid_domains_bicost
    from .singlecost import edge_cost_array, label_scalar, valid_domains_scalar

    problems: list[str] = []
    art = compile_model(model)
    im0 = art.indexed
    offset = 1 if mutate == "bound-check" else 0

    def vd_engine(rho, bounds):
        layer_of = {v: t for t, v in enumerate(im0.var_ids)}
        cur = restrict_indexed(im0, {layer_of[i]: v for i, v in rho.items()})
        if cur is None:
            return [set() for _ in range(model.n)]
        per_layer: list[set[int]]
        if not bounds:
            import numpy as np

            per_layer = [
                set(
                    np.unique(
                        cur.edge_val[cur.edge_layer_start[l] : cur.edge_layer_start[l + 1]]
                    ).tolist()
                )
                for l in range(cur.n)
            ]
        elif len(bounds) == 1:
            spec, k = bounds[0]
            ec = edge_cost_array(cur, spec)
            labels = label_scalar(cur, ec)
            per_layer = valid_domains_scalar(cur, labels, ec, k - offset)
        else:
            (s1, k1), (s2, k2) = bounds
            ec1, ec2 = int_edge_costs(cur, s1), int_edge_costs(cur, s2)
            k1i, k2i = int(k1) - offset, int(k2)
            labels = label_bicost(cur, ec1, ec2, k1i, k2i)
            per_layer = valid_domains_bicost(cur, labels, ec1, ec2, k1i, k2i)
        out = [set() for _ in range(model.n)]
        for layer, vals in enumerate(per_layer):
            out[im0.var_ids[layer]] = vals
        return out

    from .model import iter_solutions

    solutions = list(iter_solutions(model))
    checks = 0
    rhos: list[dict[int, int]] = [{}]
    for _ in range(2):
        if solutions:
            sol = rng.choice(solutions)
            i = rng.randrange(model.n)
            rhos.append({i: sol[i]})
    specs = [s for s in model.costs.values() if s.is_unary and s.is_integral]
    for rho in rhos:
        grids: list[list] = [[]]
        vals = [0]
        if specs:
            vals = sorted({int(specs[0].evaluate(s)) for s in solutions}) or [0]
            ks = sorted({vals[0], vals[len(vals) // 2], vals[-1]})
            grids.extend([[(specs[0], k)] for k in ks])
        if len(specs) >= 2:
            v2 = sorted({int(specs[1].evaluate(s)) for s in solutions}) or [0]
            grids.append([(specs[0], vals[len(vals) // 2]), (specs[1], v2[-1])])
            grids.append([(specs[0], vals[-1]), (specs[1], v2[len(v2) // 2])])
        for bounds in grids:
            got = vd_engine(rho, bounds)
            want = brute_force_vd(model, rho, bounds)
            checks += 1
            if got != want:
                problems.append(
                    f"rho={rho} bounds={[(s.name, k) for s, k in bounds]}: "
                    f"engine {got} != oracle {want}"
                )
    problems.append(f"__checks__:{checks}")
    return problems


def _cmd_verify(args) -> int:
    import random

    rng = random.Random(20240811)
    mismatches = 0
    total_checks = 0

    def run(tag: str, model):
        nonlocal mismatches, total_checks
        problems = _verify_one(model, args.mutate, rng)
        marker = [p for p in problems if p.startswith("__checks__:")]
        real = [p for p in problems if not p.startswith("__checks__:")]
        total_checks += int(marker[0].split(":", 1)[1]) if marker else 0
        if real:
            mismatches += len(real)
            print(f"{tag}: MISMATCH")
            for p in real:
                print(f"  {p}")
        else:
            print(f"{tag}: ok")

    if args.model_file:
        model, doc = _load_model_or_catalogue(args.model_file)
        if model is None:
            from .model import catalogue_to_model

            model = catalogue_to_model(doc)
        run(args.model_file, model)
    for seed in range(args.seeds):
        from .synth import random_model

        run(f"seed {seed}", random_model(seed, n_costs=2))
    print(f"checked {total_checks} queries, {mismatches} mismatches")
    return EXIT_OK if mismatches == 0 else EXIT_MISMATCH


def _cmd_bench(args) -> int:
    from .bench import format_table, run_benchmark, write_csv

    sizes = [int(float(s)) for s in args.sizes.split(",")] if args.sizes else [20_000, 100_000]
    rows = run_benchmark(
        sizes=sizes,
        n_costs=args.costs,
        repeat=args.repeat,
        compare_backends=args.compare_backends,
    )
    print(format_table(rows))
    if args.csv:
        write_csv(rows, args.csv)
        print(f"wrote {args.csv}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mddconfig", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile a model or catalogue into an artifact")
    c.add_argument("model_file")
    c.add_argument("-o", "--output", help="artifact destination (JSON)")
    c.add_argument("--stats", action="store_true", help="print per-phase counts and times")
    c.add_argument("--node-limit", type=int, default=None)
    c.add_argument("--time-budget", type=float, default=None)
    c.set_defaults(fn=_cmd_compile)

    q = sub.add_parser("query", help="answer domain queries against an artifact")
    q.add_argument("mdd_file")
    q.add_argument("--assign", action="append", metavar="NAME=VALUE")
    q.add_argument("--cost", action="append", metavar="NAME")
    q.add_argument("--max", action="append", metavar="K")
    q.add_argument("--epsilon", type=float, default=None)
    q.add_argument("--marginals", metavar="SEMIRING")
    q.set_defaults(fn=_cmd_query)

    v = sub.add_parser("verify", help="cross-check the engine against enumeration")
    v.add_argument("model_file", nargs="?", default=None)
    v.add_argument("--seeds", type=int, default=0, help="additional random instances")
    v.add_argument(
        "--mutate",
        choices=("bound-check",),
        default=None,
        help="inject an off-by-one into the bound comparison; verification must fail",
    )
    v.set_defaults(fn=_cmd_verify)

    b = sub.add_parser("bench", help="time per-interaction phases on synthetic diagrams")
    b.add_argument("--sizes", help="comma-separated target edge counts, e.g. 2e4,1e5")
    b.add_argument("--costs", type=int, choices=(1, 2), default=1)
    b.add_argument("--csv", help="also write rows to this CSV file")
    b.add_argument("--repeat", type=int, default=5)
    b.add_argument("--compare-backends", action="store_true")
    b.set_defaults(fn=_cmd_bench)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.set_defaults(fn=_cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except QueryError as exc:
        print(f"query error: {exc}", file=sys.stderr)
        return EXIT_QUERY
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
