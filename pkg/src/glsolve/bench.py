"""Benchmark harness: seeded repeats of decompose/select/evaluate over a
budget sweep, streamed to CSV one row at a time so long runs stay
resumable and partial output is usable."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

from .decomposition import BisectMethod, hierarchical_decomposition, perfect_tree_sparsifier
from .errors import DataError
from .evaluation import eval_graph_objective
from .graph import WeightedGraph, is_tree
from .rational import ratio_decimal
from .selector import ImportanceSpec, select_labels

CSV_COLUMNS = [
    "dataset",
    "method",
    "k",
    "psi_graph",
    "psi_tree",
    "labels_used",
    "decompose_ms",
    "select_ms",
    "evaluate_ms",
    "seed",
    "repeat_index",
]


@dataclass
class BenchRow:
    dataset: str
    method: str
    k: int
    psi_graph: str  # 6-decimal rendering; audits re-derive exact values
    psi_tree: str
    labels_used: int
    decompose_ms: float
    select_ms: float
    evaluate_ms: float
    seed: int
    repeat_index: int

    def __post_init__(self):
        if self.labels_used > self.k:
            raise DataError("labels_used exceeds the budget k")

    def to_csv_values(self) -> list[str]:
        return [
            self.dataset,
            self.method,
            str(self.k),
            self.psi_graph,
            self.psi_tree,
            str(self.labels_used),
            f"{self.decompose_ms:.3f}",
            f"{self.select_ms:.3f}",
            f"{self.evaluate_ms:.3f}",
            str(self.seed),
            str(self.repeat_index),
        ]

    @classmethod
    def from_csv_row(cls, row: dict[str, str]) -> "BenchRow":
        missing = [c for c in CSV_COLUMNS if c not in row or row[c] is None]
        if missing:
            raise DataError(f"CSV row is missing columns {missing}")
        return cls(
            dataset=row["dataset"],
            method=row["method"],
            k=int(row["k"]),
            psi_graph=row["psi_graph"],
            psi_tree=row["psi_tree"],
            labels_used=int(row["labels_used"]),
            decompose_ms=float(row["decompose_ms"]),
            select_ms=float(row["select_ms"]),
            evaluate_ms=float(row["evaluate_ms"]),
            seed=int(row["seed"]),
            repeat_index=int(row["repeat_index"]),
        )


def read_bench_csv(path: str) -> list[BenchRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise DataError(f"unexpected CSV header {reader.fieldnames}; expected {CSV_COLUMNS}")
        return [BenchRow.from_csv_row(row) for row in reader]


def run_bench(
    g: WeightedGraph,
    dataset: str,
    k_list: list[int],
    methods: list[BisectMethod],
    repeats: int,
    seed_base: int,
    csv_path: str,
    labels_dir: str | None = None,
    importance: ImportanceSpec | None = None,
    progress=None,
) -> list[BenchRow]:
    """One row per (method, k, repeat); appends to csv_path, flushing each row.

    Stored label files (when labels_dir is given) let audits re-evaluate
    psi_graph exactly. Seeds are seed_base + repeat_index.
    """
    if repeats < 1:
        raise DataError("repeats must be >= 1")
    for k in k_list:
        if not 1 <= k <= g.n:
            raise DataError(f"budget {k} outside 1..{g.n}")
    if importance is None:
        importance = ImportanceSpec()
    f_values = importance.resolve(graph=g)
    dense_of_orig = g.dense_of_orig()

    path = Path(csv_path)
    write_header = not path.exists() or path.stat().st_size == 0
    rows: list[BenchRow] = []
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if write_header:
            writer.writerow(CSV_COLUMNS)
            fh.flush()
        for method in methods:
            for repeat in range(repeats):
                seed = seed_base + repeat
                seeded = BisectMethod(
                    variant=method.variant,
                    beta=method.beta,
                    partitioner_cmd=method.partitioner_cmd,
                    samples=method.samples,
                    seed=seed,
                )
                t0 = time.perf_counter()
                if is_tree(g):
                    tree = perfect_tree_sparsifier(g)
                    method_name = "tree-exact"
                else:
                    tree = hierarchical_decomposition(g, seeded)
                    method_name = seeded.describe()
                decompose_ms = (time.perf_counter() - t0) * 1000.0
                for k in k_list:
                    selection = select_labels(tree, k, f_values)
                    select_ms = selection.timings_ms["select"]
                    t0 = time.perf_counter()
                    label_dense = {dense_of_orig[orig] for orig in selection.labels}
                    psi_graph = eval_graph_objective(g, label_dense, f_values)
                    evaluate_ms = (time.perf_counter() - t0) * 1000.0
                    if not (selection.tree_value >= psi_graph):
                        raise AssertionError("tree objective below graph objective")
                    row = BenchRow(
                        dataset=dataset,
                        method=method_name,
                        k=k,
                        psi_graph=ratio_decimal(psi_graph),
                        psi_tree=ratio_decimal(selection.tree_value),
                        labels_used=selection.k_used,
                        decompose_ms=decompose_ms,
                        select_ms=select_ms,
                        evaluate_ms=evaluate_ms,
                        seed=seed,
                        repeat_index=repeat,
                    )
                    writer.writerow(row.to_csv_values())
                    fh.flush()
                    rows.append(row)
                    if labels_dir is not None:
                        name = f"{dataset}__{method_name}__k{k}__seed{seed}.labels"
                        label_path = Path(labels_dir) / _safe_filename(name)
                        with open(label_path, "w", encoding="utf-8") as lf:
                            for orig in sorted(selection.labels):
                                lf.write(f"{orig}\n")
                    if progress is not None:
                        progress(row)
    return rows


def _safe_filename(name: str) -> str:
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in name)
