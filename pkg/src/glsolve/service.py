"""HTTP service wrapping the solver.

Payloads are self-contained: graphs travel as edge-list text and trees as
".dt" text, so the service stays stateless and any number of clients can
share one instance. The CLI doubles as a thin client for every endpoint.
"""

from __future__ import annotations

import time

from fastapi import FastAPI
from pydantic import BaseModel, Field

from . import __version__
from .decomposition import BisectMethod, binarize, hierarchical_decomposition, perfect_tree_sparsifier
from .errors import GlsError, SizeGuardError, UsageError
from .evaluation import brute_force_opt, eval_graph_objective, eval_tree_objective
from .graph import WeightedGraph, is_tree, parse_edge_list, preprocess
from .rational import format_ratio, ratio_decimal
from .selector import ImportanceSpec, Selection, gls_pipeline, select_labels
from .tree import DecompTree, parse_dt_text, to_dt_text


class BisectSpec(BaseModel):
    variant: str = "fiedler"
    beta: float = 0.0
    samples: int = 0
    partitioner_cmd: str | None = None
    seed: int = 0

    def to_method(self) -> BisectMethod:
        return BisectMethod(
            variant=self.variant,
            beta=self.beta,
            samples=self.samples,
            partitioner_cmd=self.partitioner_cmd,
            seed=self.seed,
        )


class ImportancePayload(BaseModel):
    kind: str = "uniform"  # uniform | degree | explicit
    values: dict[str, int] | None = None  # original id -> value, for "explicit"

    def to_spec(self) -> ImportanceSpec:
        if self.kind == "explicit":
            if self.values is None:
                raise UsageError("explicit importance needs values")
            return ImportanceSpec(kind="file", file_values={int(k): v for k, v in self.values.items()})
        if self.kind in ("uniform", "degree"):
            return ImportanceSpec(kind=self.kind)
        raise UsageError(f"unknown importance kind {self.kind!r}")


class DecomposeRequest(BaseModel):
    edge_list: str
    bisect: BisectSpec = Field(default_factory=BisectSpec)


class DecomposeResponse(BaseModel):
    tree_dt: str
    num_nodes: int
    num_leaves: int
    decompose_ms: float


class SelectRequest(BaseModel):
    tree_dt: str
    k: int
    importance: ImportancePayload = Field(default_factory=ImportancePayload)
    edge_list: str | None = None
    evaluate_graph: bool = False


class RunRequest(BaseModel):
    edge_list: str
    k: int
    bisect: BisectSpec = Field(default_factory=BisectSpec)
    importance: ImportancePayload = Field(default_factory=ImportancePayload)
    evaluate_graph: bool = True
    include_tree: bool = False


class SelectionResponse(BaseModel):
    labels: list[int]
    k_requested: int
    k_used: int
    tree_value: str
    tree_value_decimal: str
    graph_value: str | None = None
    graph_value_decimal: str | None = None
    method: str
    seed: int
    timings_ms: dict[str, float]
    tree_dt: str | None = None


class EvaluateRequest(BaseModel):
    edge_list: str
    labels: list[int]
    tree_dt: str | None = None
    importance: ImportancePayload = Field(default_factory=ImportancePayload)


class EvaluateResponse(BaseModel):
    psi_graph: str
    psi_graph_decimal: str
    psi_tree: str | None = None
    psi_tree_decimal: str | None = None


class OracleRequest(BaseModel):
    edge_list: str
    k: int
    importance: ImportancePayload = Field(default_factory=ImportancePayload)


class OracleResponse(BaseModel):
    opt_labels: list[int]
    opt_value: str
    opt_value_decimal: str


def _graph_from_text(text: str) -> WeightedGraph:
    return preprocess(parse_edge_list(text))


def _selection_response(selection: Selection, tree_dt: str | None = None) -> SelectionResponse:
    return SelectionResponse(
        labels=sorted(selection.labels),
        k_requested=selection.k_requested,
        k_used=selection.k_used,
        tree_value=format_ratio(selection.tree_value),
        tree_value_decimal=ratio_decimal(selection.tree_value),
        graph_value=None if selection.graph_value is None else format_ratio(selection.graph_value),
        graph_value_decimal=None if selection.graph_value is None else ratio_decimal(selection.graph_value),
        method=selection.method,
        seed=selection.seed,
        timings_ms=selection.timings_ms,
        tree_dt=tree_dt,
    )


def _tree_from_text(text: str) -> DecompTree:
    tree = parse_dt_text(text)
    if tree.max_arity() > 2:
        binarize(tree)
    return tree


def _match_tree_graph(tree: DecompTree, g: WeightedGraph) -> dict[int, int]:
    dense = g.dense_of_orig()
    if sorted(tree.orig_ids) != sorted(g.orig_id):
        raise UsageError("tree leaves and graph vertices carry different original ids")
    return {tv: dense[orig] for tv, orig in enumerate(tree.orig_ids)}


def create_app() -> FastAPI:
    app = FastAPI(title="glsolve", version=__version__)

    @app.exception_handler(GlsError)
    async def _gls_error(request, exc: GlsError):
        from fastapi.responses import JSONResponse

        if isinstance(exc, SizeGuardError):
            status = 413
        elif isinstance(exc, UsageError):
            status = 400
        else:
            status = 422
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/decompose", response_model=DecomposeResponse)
    def decompose(req: DecomposeRequest):
        g = _graph_from_text(req.edge_list)
        method = req.bisect.to_method()
        t0 = time.perf_counter()
        tree = perfect_tree_sparsifier(g) if is_tree(g) else hierarchical_decomposition(g, method)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        return DecomposeResponse(
            tree_dt=to_dt_text(tree),
            num_nodes=len(tree.nodes),
            num_leaves=tree.num_leaves,
            decompose_ms=wall_ms,
        )

    @app.post("/select", response_model=SelectionResponse)
    def select(req: SelectRequest):
        tree = _tree_from_text(req.tree_dt)
        spec = req.importance.to_spec()
        g = _graph_from_text(req.edge_list) if req.edge_list else None
        if spec.kind == "degree" and g is None:
            raise UsageError("degree importance needs edge_list")
        if req.evaluate_graph and g is None:
            raise UsageError("evaluate_graph needs edge_list")
        to_graph = _match_tree_graph(tree, g) if g is not None else None
        if g is not None:
            f_graph = spec.resolve(graph=g)
            by_orig = dict(zip(g.orig_id, f_graph))
            f_values = [by_orig[orig] for orig in tree.orig_ids]
        else:
            f_values = spec.resolve(orig_ids=tree.orig_ids)
        selection = select_labels(tree, req.k, f_values)
        selection.method = "tree-payload"
        if req.evaluate_graph:
            t0 = time.perf_counter()
            label_dense = {
                to_graph[v] for v, orig in enumerate(tree.orig_ids) if orig in selection.labels
            }
            selection.graph_value = eval_graph_objective(g, label_dense, f_graph)
            selection.timings_ms["evaluate"] = (time.perf_counter() - t0) * 1000.0
        return _selection_response(selection)

    @app.post("/run", response_model=SelectionResponse)
    def run(req: RunRequest):
        g = _graph_from_text(req.edge_list)
        selection = gls_pipeline(
            g,
            req.k,
            method=req.bisect.to_method(),
            importance=req.importance.to_spec(),
            evaluate_graph=req.evaluate_graph,
        )
        tree_dt = to_dt_text(selection.tree) if req.include_tree else None
        return _selection_response(selection, tree_dt=tree_dt)

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(req: EvaluateRequest):
        g = _graph_from_text(req.edge_list)
        spec = req.importance.to_spec()
        f_graph = spec.resolve(graph=g)
        dense = g.dense_of_orig()
        unknown = [orig for orig in req.labels if orig not in dense]
        if unknown:
            raise UsageError(f"labels not in the graph: {sorted(unknown)[:5]}")
        label_dense = {dense[orig] for orig in req.labels}
        psi_graph = eval_graph_objective(g, label_dense, f_graph)
        psi_tree = None
        if req.tree_dt:
            tree = _tree_from_text(req.tree_dt)
            _match_tree_graph(tree, g)
            by_orig = dict(zip(g.orig_id, f_graph))
            f_tree = [by_orig[orig] for orig in tree.orig_ids]
            tree_labels = {v for v, orig in enumerate(tree.orig_ids) if orig in set(req.labels)}
            psi_tree = eval_tree_objective(tree, tree_labels, f_tree)
        return EvaluateResponse(
            psi_graph=format_ratio(psi_graph),
            psi_graph_decimal=ratio_decimal(psi_graph),
            psi_tree=None if psi_tree is None else format_ratio(psi_tree),
            psi_tree_decimal=None if psi_tree is None else ratio_decimal(psi_tree),
        )

    @app.post("/oracle", response_model=OracleResponse)
    def oracle(req: OracleRequest):
        g = _graph_from_text(req.edge_list)
        spec = req.importance.to_spec()
        labels, value = brute_force_opt(g, req.k, spec.resolve(graph=g))
        return OracleResponse(
            opt_labels=sorted(g.orig_id[v] for v in labels),
            opt_value=format_ratio(value),
            opt_value_decimal=ratio_decimal(value),
        )

    return app
