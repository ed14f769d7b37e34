"""Command-line interface.

Subcommands mirror the pipeline stages (decompose, select, run, evaluate,
oracle, bench) plus `serve` for the HTTP service. Every compute command
also works as a thin client against a running service via --server.

Exit codes: 0 success, 1 usage error, 2 data error, 3 size-guard refusal.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .bench import run_bench
from .decomposition import BisectMethod, binarize, hierarchical_decomposition, perfect_tree_sparsifier
from .errors import GlsError, SizeGuardError, UsageError
from .evaluation import brute_force_opt, eval_graph_objective, eval_tree_objective
from .graph import WeightedGraph, is_tree, parse_edge_list, preprocess
from .rational import format_ratio, ratio_decimal
from .selector import ImportanceSpec, gls_pipeline, select_labels
from .tree import DecompTree, load_dt, save_dt


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load_graph(path: str) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return preprocess(parse_edge_list(fh.read()))


def _load_labels(path: str) -> list[int]:
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                labels.append(int(stripped))
            except ValueError:
                raise UsageError(f"labels file line {lineno}: expected an integer id") from None
    return labels


def _load_importance_file(path: str) -> dict[int, int]:
    values: dict[int, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise UsageError(f"importance file line {lineno}: expected '<vertex> <value>'")
            values[int(parts[0])] = int(parts[1])
    return values


def _importance_from_args(args) -> ImportanceSpec:
    kind = getattr(args, "importance", "uniform")
    if kind == "file":
        if not getattr(args, "importance_file", None):
            raise UsageError("--importance file requires --importance-file")
        return ImportanceSpec(kind="file", file_values=_load_importance_file(args.importance_file))
    if getattr(args, "importance_file", None):
        raise UsageError("--importance-file only makes sense with --importance file")
    return ImportanceSpec(kind=kind)


def _method_from_args(args) -> BisectMethod:
    variant = args.bisect
    if args.beta is not None and variant != "fiedler-balanced":
        raise UsageError("--beta requires --bisect fiedler-balanced")
    if args.samples is not None and variant != "sampled":
        raise UsageError("--samples requires --bisect sampled")
    if args.partitioner_cmd is not None and variant != "sampled":
        raise UsageError("--partitioner-cmd requires --bisect sampled")
    if variant == "fiedler-balanced":
        if args.beta is None:
            raise UsageError("--bisect fiedler-balanced requires --beta")
        if not 0.0 < args.beta < 0.5:
            raise UsageError(f"--beta must lie in (0, 0.5), got {args.beta}")
        return BisectMethod(variant=variant, beta=args.beta, seed=args.seed)
    if variant == "sampled":
        if args.partitioner_cmd is None:
            raise UsageError("--bisect sampled requires --partitioner-cmd")
        return BisectMethod(
            variant=variant,
            partitioner_cmd=args.partitioner_cmd,
            samples=args.samples if args.samples is not None else 16,
            seed=args.seed,
        )
    return BisectMethod(variant="fiedler", seed=args.seed)


def parse_method_descriptor(text: str, partitioner_cmd: str | None, seed: int = 0) -> BisectMethod:
    """Bench method grammar: fiedler | fiedler-balanced=BETA | sampled=SAMPLES."""
    name, _, param = text.partition("=")
    name = name.strip()
    if name == "fiedler":
        return BisectMethod(variant="fiedler", seed=seed)
    if name == "fiedler-balanced":
        if not param:
            raise UsageError("fiedler-balanced needs '=BETA'")
        try:
            beta = float(param)
        except ValueError:
            raise UsageError(f"bad beta {param!r}") from None
        if not 0.0 < beta < 0.5:
            raise UsageError(f"beta must lie in (0, 0.5), got {beta}")
        return BisectMethod(variant="fiedler-balanced", beta=beta, seed=seed)
    if name == "sampled":
        if partitioner_cmd is None:
            raise UsageError("sampled methods need --partitioner-cmd")
        try:
            samples = int(param) if param else 16
        except ValueError:
            raise UsageError(f"bad sample count {param!r}") from None
        return BisectMethod(variant="sampled", partitioner_cmd=partitioner_cmd, samples=samples, seed=seed)
    raise UsageError(f"unknown method {name!r}")


def _tree_for_select(path: str) -> DecompTree:
    tree = load_dt(path)
    if tree.max_arity() > 2:
        binarize(tree)  # value-preserving; external trees may be flat
    return tree


def _match_tree_graph(tree: DecompTree, g: WeightedGraph) -> dict[int, int]:
    """tree dense vertex -> graph dense vertex, by original id."""
    dense = g.dense_of_orig()
    if sorted(tree.orig_ids) != sorted(g.orig_id):
        raise UsageError("tree leaves and graph vertices carry different original ids")
    return {tv: dense[orig] for tv, orig in enumerate(tree.orig_ids)}


def _resolve_importance_for_tree(spec: ImportanceSpec, tree: DecompTree, g: WeightedGraph | None):
    if spec.kind == "degree" and g is None:
        raise UsageError("--importance degree requires --graph")
    if g is not None:
        by_orig = dict(zip(g.orig_id, spec.resolve(graph=g)))
        return [by_orig[orig] for orig in tree.orig_ids]
    return spec.resolve(orig_ids=tree.orig_ids)


def _write_labels(path: str, labels: set[int]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for orig in sorted(labels):
            fh.write(f"{orig}\n")


# ---------------------------------------------------------------- commands


def _cmd_decompose(args) -> int:
    if args.server:
        return _client_decompose(args)
    method = _method_from_args(args)
    g = _load_graph(args.input)
    t0 = time.perf_counter()
    if is_tree(g):
        tree = perfect_tree_sparsifier(g)
    else:
        tree = hierarchical_decomposition(g, method)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    save_dt(tree, args.output)
    print(f"nodes={len(tree.nodes)}")
    print(f"leaves={tree.num_leaves}")
    print(f"wall_ms={wall_ms:.3f}")
    return 0


def _cmd_select(args) -> int:
    if args.server:
        return _client_select(args)
    tree = _tree_for_select(args.tree)
    g = _load_graph(args.graph) if args.graph else None
    to_graph = _match_tree_graph(tree, g) if g is not None else None
    spec = _importance_from_args(args)
    f_values = _resolve_importance_for_tree(spec, tree, g)
    selection = select_labels(tree, args.k, f_values)
    selection.method = f"tree-file({Path(args.tree).name})"
    if g is not None:
        t0 = time.perf_counter()
        tree_dense = {v for v, orig in enumerate(tree.orig_ids) if orig in selection.labels}
        f_graph = spec.resolve(graph=g)
        selection.graph_value = eval_graph_objective(
            g, {to_graph[v] for v in tree_dense}, f_graph
        )
        selection.timings_ms["evaluate"] = (time.perf_counter() - t0) * 1000.0
    if args.labels_out:
        _write_labels(args.labels_out, selection.labels)
    for line in selection.summary_lines():
        print(line)
    return 0


def _cmd_run(args) -> int:
    if args.server:
        return _client_run(args)
    method = _method_from_args(args)
    g = _load_graph(args.input)
    spec = _importance_from_args(args)
    selection = gls_pipeline(
        g, args.k, method=method, importance=spec, evaluate_graph=not args.no_evaluate
    )
    if args.tree_out:
        save_dt(selection.tree, args.tree_out)
    if args.labels_out:
        _write_labels(args.labels_out, selection.labels)
    for line in selection.summary_lines():
        print(line)
    return 0


def _cmd_evaluate(args) -> int:
    if args.server:
        return _client_evaluate(args)
    g = _load_graph(args.input)
    spec = _importance_from_args(args)
    f_graph = spec.resolve(graph=g)
    labels_orig = set(_load_labels(args.labels))
    dense = g.dense_of_orig()
    unknown = [orig for orig in labels_orig if orig not in dense]
    if unknown:
        raise UsageError(f"labels not in the graph: {sorted(unknown)[:5]}")
    label_dense = {dense[orig] for orig in labels_orig}
    psi_graph = eval_graph_objective(g, label_dense, f_graph)
    print(f"psi_graph={format_ratio(psi_graph)}")
    print(f"psi_graph_decimal={ratio_decimal(psi_graph)}")
    if args.tree:
        tree = _tree_for_select(args.tree)
        to_graph = _match_tree_graph(tree, g)
        by_orig = dict(zip(g.orig_id, f_graph))
        f_tree = [by_orig[orig] for orig in tree.orig_ids]
        tree_labels = {v for v, orig in enumerate(tree.orig_ids) if orig in labels_orig}
        psi_tree = eval_tree_objective(tree, tree_labels, f_tree)
        print(f"psi_tree={format_ratio(psi_tree)}")
        print(f"psi_tree_decimal={ratio_decimal(psi_tree)}")
        if not (psi_tree >= psi_graph):
            print("warning: tree value below graph value; tree was not built for this graph", file=sys.stderr)
    return 0


def _cmd_oracle(args) -> int:
    if args.server:
        return _client_oracle(args)
    g = _load_graph(args.input)
    spec = _importance_from_args(args)
    labels, value = brute_force_opt(g, args.k, spec.resolve(graph=g))
    print(f"opt_value={format_ratio(value)}")
    print(f"opt_value_decimal={ratio_decimal(value)}")
    print("opt_labels=" + " ".join(str(g.orig_id[v]) for v in sorted(labels)))
    return 0


def _cmd_bench(args) -> int:
    g = _load_graph(args.input)
    try:
        k_list = [int(tok) for tok in args.k_list.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"bad --k-list {args.k_list!r}") from None
    if not k_list:
        raise UsageError("--k-list is empty")
    methods = [
        parse_method_descriptor(tok.strip(), args.partitioner_cmd)
        for tok in args.methods.split(",")
        if tok.strip()
    ]
    if not methods:
        raise UsageError("--methods is empty")
    dataset = args.dataset or Path(args.input).stem
    spec = _importance_from_args(args)
    if args.labels_dir:
        Path(args.labels_dir).mkdir(parents=True, exist_ok=True)
    rows = run_bench(
        g,
        dataset,
        k_list,
        methods,
        repeats=args.repeats,
        seed_base=args.seed_base,
        csv_path=args.csv,
        labels_dir=args.labels_dir,
        importance=spec,
        progress=lambda row: print(
            f"method={row.method} k={row.k} repeat={row.repeat_index} "
            f"psi_graph={row.psi_graph} psi_tree={row.psi_tree}"
        ),
    )
    print(f"rows={len(rows)}")
    print(f"csv={args.csv}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


# ------------------------------------------------------------- thin client


def _post(server: str, endpoint: str, payload: dict) -> dict:
    import httpx

    url = server.rstrip("/") + endpoint
    response = httpx.post(url, json=payload, timeout=None)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except Exception:
            detail = response.text
        if response.status_code == 413:
            raise SizeGuardError(str(detail))
        raise GlsError(f"server returned {response.status_code}: {detail}")
    return response.json()


def _bisect_payload(args) -> dict:
    method = _method_from_args(args)
    return {
        "variant": method.variant,
        "beta": method.beta,
        "samples": method.samples,
        "partitioner_cmd": method.partitioner_cmd,
        "seed": method.seed,
    }


def _importance_payload(args) -> dict:
    spec = _importance_from_args(args)
    if spec.kind == "file":
        return {"kind": "explicit", "values": {str(k): v for k, v in spec.file_values.items()}}
    return {"kind": spec.kind}


def _client_decompose(args) -> int:
    payload = {
        "edge_list": Path(args.input).read_text(encoding="utf-8"),
        "bisect": _bisect_payload(args),
    }
    out = _post(args.server, "/decompose", payload)
    Path(args.output).write_text(out["tree_dt"], encoding="utf-8")
    print(f"nodes={out['num_nodes']}")
    print(f"leaves={out['num_leaves']}")
    print(f"wall_ms={out['decompose_ms']:.3f}")
    return 0


def _print_selection_response(out: dict) -> None:
    print(f"k_requested={out['k_requested']}")
    print(f"k_used={out['k_used']}")
    print(f"tree_value={out['tree_value']}")
    print(f"tree_value_decimal={out['tree_value_decimal']}")
    if out.get("graph_value") is not None:
        print(f"graph_value={out['graph_value']}")
        print(f"graph_value_decimal={out['graph_value_decimal']}")
    print(f"method={out['method']}")
    print(f"seed={out['seed']}")
    for phase, ms in out.get("timings_ms", {}).items():
        print(f"{phase}_ms={ms:.3f}")


def _client_select(args) -> int:
    payload = {
        "tree_dt": Path(args.tree).read_text(encoding="utf-8"),
        "k": args.k,
        "importance": _importance_payload(args),
        "edge_list": Path(args.graph).read_text(encoding="utf-8") if args.graph else None,
        "evaluate_graph": bool(args.graph),
    }
    out = _post(args.server, "/select", payload)
    if args.labels_out:
        _write_labels(args.labels_out, set(out["labels"]))
    _print_selection_response(out)
    return 0


def _client_run(args) -> int:
    payload = {
        "edge_list": Path(args.input).read_text(encoding="utf-8"),
        "k": args.k,
        "bisect": _bisect_payload(args),
        "importance": _importance_payload(args),
        "evaluate_graph": not args.no_evaluate,
        "include_tree": bool(args.tree_out),
    }
    out = _post(args.server, "/run", payload)
    if args.tree_out and out.get("tree_dt"):
        Path(args.tree_out).write_text(out["tree_dt"], encoding="utf-8")
    if args.labels_out:
        _write_labels(args.labels_out, set(out["labels"]))
    _print_selection_response(out)
    return 0


def _client_evaluate(args) -> int:
    payload = {
        "edge_list": Path(args.input).read_text(encoding="utf-8"),
        "labels": sorted(set(_load_labels(args.labels))),
        "tree_dt": Path(args.tree).read_text(encoding="utf-8") if args.tree else None,
        "importance": _importance_payload(args),
    }
    out = _post(args.server, "/evaluate", payload)
    print(f"psi_graph={out['psi_graph']}")
    print(f"psi_graph_decimal={out['psi_graph_decimal']}")
    if out.get("psi_tree") is not None:
        print(f"psi_tree={out['psi_tree']}")
        print(f"psi_tree_decimal={out['psi_tree_decimal']}")
    return 0


def _client_oracle(args) -> int:
    payload = {
        "edge_list": Path(args.input).read_text(encoding="utf-8"),
        "k": args.k,
        "importance": _importance_payload(args),
    }
    out = _post(args.server, "/oracle", payload)
    print(f"opt_value={out['opt_value']}")
    print(f"opt_value_decimal={out['opt_value_decimal']}")
    print("opt_labels=" + " ".join(str(v) for v in out["opt_labels"]))
    return 0


# ----------------------------------------------------------------- parser


def _add_bisect_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bisect", choices=["fiedler", "fiedler-balanced", "sampled"], default="fiedler")
    p.add_argument("--beta", type=float, default=None, help="balance floor for fiedler-balanced")
    p.add_argument("--samples", type=int, default=None, help="grid size for sampled bisection")
    p.add_argument("--partitioner-cmd", default=None, help="external partitioner command template")
    p.add_argument("--seed", type=int, default=0)


def _add_importance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--importance", choices=["uniform", "degree", "file"], default="uniform")
    p.add_argument("--importance-file", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glsolve", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="build a decomposition tree from an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="path for the .dt tree file")
    _add_bisect_flags(p)
    p.add_argument("--server", default=None, help="run remotely against this service URL")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("select", help="select labels on an existing tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--graph", default=None, help="edge list; enables graph-objective evaluation")
    p.add_argument("--labels-out", default=None)
    _add_importance_flags(p)
    p.add_argument("--server", default=None)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("run", help="decompose, select, and evaluate in one go")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--labels-out", default=None)
    p.add_argument("--tree-out", default=None)
    p.add_argument("--no-evaluate", action="store_true", help="skip the graph-objective evaluation")
    _add_bisect_flags(p)
    _add_importance_flags(p)
    p.add_argument("--server", default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("evaluate", help="evaluate a stored label set")
    p.add_argument("--input", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--tree", default=None, help="also evaluate the tree objective on this .dt file")
    _add_importance_flags(p)
    p.add_argument("--server", default=None)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("oracle", help="brute-force optimum for small graphs")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    _add_importance_flags(p)
    p.add_argument("--server", default=None)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("bench", help="benchmark sweep writing CSV rows")
    p.add_argument("--input", required=True)
    p.add_argument("--k-list", required=True, help="comma-separated budgets")
    p.add_argument("--methods", required=True, help="comma-separated method descriptors")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--csv", required=True)
    p.add_argument("--labels-dir", default=None, help="store per-row label files here")
    p.add_argument("--dataset", default=None, help="dataset name for the CSV (default: file stem)")
    p.add_argument("--partitioner-cmd", default=None)
    _add_importance_flags(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return 3
    except (GlsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
