"""Benchmark suites: run solvers over instances and emit CSV/JSON reports.

A suite is a cross product of instances, methods, and seeds. Every row is
seed-deterministic, so worker parallelism (bounded by the GDFL_THREADS
environment variable) changes wall time only, never values.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from ._version import __version__
from .baselines import dga, one_flip_local_search
from .gnn import TrainConfig, project_and_repair, train
from .graph import Graph, generate_d_regular, generate_erdos_renyi, load_gset
from .pipeline import PipelineConfig, end_to_end_solve
from .qubo import ProblemKind, brute_force_optimum, build_qubo, is_feasible, objective
from .reference import best_known

__all__ = [
    "METHODS",
    "InstanceSpec",
    "SuiteSpec",
    "BenchReport",
    "relative_error",
    "run_suite",
    "emit_report",
]

METHODS = ("gnn-solver", "dfl-pipeline", "dga", "dga+local-search", "oracle")

CSV_HEADER = "instance,n,m,method,objective,feasible,runtime_ms,seed,epsilon"


def relative_error(ours: float, best: float, maximize: bool = True) -> float:
    """Gap to the best-known objective, clamped below at zero.

    (best - ours) / best when larger is better, (ours - best) / best when
    smaller is better.
    """
    if best <= 0.0:
        raise ValueError(f"best-known value must be positive, got {best}")
    eps = (best - ours) / best if maximize else (ours - best) / best
    return max(0.0, float(eps))


@dataclass(frozen=True)
class InstanceSpec:
    """One benchmark instance: a file on disk or a seeded generator."""

    name: str
    path: str | None = None
    generator: str | None = None
    n: int = 0
    d: int = 0
    p: float = 0.0
    seed: int = 0

    def load(self) -> Graph:
        if self.path is not None:
            if not os.path.exists(self.path):
                raise FileNotFoundError(f"instance file not found: {self.path}")
            return load_gset(self.path)
        if self.generator == "d-regular":
            return generate_d_regular(self.n, self.d, self.seed)
        if self.generator == "erdos-renyi":
            return generate_erdos_renyi(self.n, self.p, self.seed)
        raise ValueError(
            f"instance {self.name!r} needs a path or a known generator, "
            f"got generator={self.generator!r}"
        )


@dataclass(frozen=True)
class SuiteSpec:
    """Cross product of instances, methods, and seeds plus run settings."""

    problem: ProblemKind
    instances: tuple[InstanceSpec, ...]
    methods: tuple[str, ...]
    seeds: tuple[int, ...] = (0,)
    penalty: float = 2.0
    polish: bool = True
    observe_fraction: float = 0.8
    lam: float = 1.0
    epochs: int | None = None
    lr: float | None = None
    d0: int | None = None
    d1: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "problem", ProblemKind(self.problem))
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}, expected one of {METHODS}")
        names = [inst.name for inst in self.instances]
        if len(set(names)) != len(names):
            raise ValueError("instance names must be unique")

    def digest(self) -> str:
        doc = asdict(self)
        doc["problem"] = self.problem.value
        return hashlib.sha256(
            json.dumps(doc, sort_keys=True).encode()
        ).hexdigest()


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[dict, ...]
    metadata: dict


def _solver_cfg(spec: SuiteSpec, seed: int) -> TrainConfig:
    kw: dict = {"seed": seed}
    if spec.epochs is not None:
        kw["max_epochs"] = spec.epochs
    if spec.lr is not None:
        kw["learning_rate"] = spec.lr
    if spec.d0 is not None:
        kw["d0"] = spec.d0
    if spec.d1 is not None:
        kw["d1"] = spec.d1
    return TrainConfig(**kw)


def _run_method(
    spec: SuiteSpec, g: Graph, method: str, seed: int
) -> tuple[float, bool]:
    kind = spec.problem
    if method == "oracle":
        x, val = brute_force_optimum(kind, g)
        return val, bool(is_feasible(kind, g, x))
    if method == "dga":
        x = dga(kind, g)
    elif method == "dga+local-search":
        x = one_flip_local_search(kind, g, dga(kind, g))
    elif method == "gnn-solver":
        q = build_qubo(kind, g, spec.penalty)
        soft, _ = train(g, q, _solver_cfg(spec, seed))
        x = project_and_repair(kind, g, soft, polish=spec.polish)
    elif method == "dfl-pipeline":
        cfg = PipelineConfig(
            kind=kind,
            observe_fraction=spec.observe_fraction,
            lam=spec.lam,
            predictor_cfg=TrainConfig(seed=seed),
            solver_cfg=_solver_cfg(spec, seed),
            seed=seed,
            penalty=spec.penalty,
            polish=spec.polish,
        )
        res = end_to_end_solve(g, cfg)
        return res.objective_true, res.feasible_true
    else:
        raise ValueError(f"unknown method {method!r}")
    return objective(kind, g, x), bool(is_feasible(kind, g, x))


def _run_row(spec: SuiteSpec, name: str, g: Graph, method: str, seed: int) -> dict:
    t0 = time.perf_counter()
    obj, feasible = _run_method(spec, g, method, seed)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    ref = best_known(name)
    eps = (
        relative_error(obj, ref, spec.problem.maximize)
        if ref is not None
        else None
    )
    return {
        "instance": name,
        "n": g.n,
        "m": g.m,
        "method": method,
        "objective": float(obj),
        "feasible": bool(feasible),
        "runtime_ms": runtime_ms,
        "seed": seed,
        "epsilon": eps,
    }


def _worker_count() -> int:
    raw = os.environ.get("GDFL_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    count = int(raw)
    if count < 1:
        raise ValueError(f"GDFL_THREADS must be at least 1, got {count}")
    return count


def run_suite(spec: SuiteSpec) -> BenchReport:
    """Run every (instance, method, seed) combination into one report.

    Instances load up front so a missing file fails before any solver
    starts. Rows are ordered by (instance, method, seed).
    """
    graphs = {inst.name: inst.load() for inst in spec.instances}
    tasks = sorted(
        (name, method, seed)
        for name in graphs
        for method in spec.methods
        for seed in spec.seeds
    )
    rows: list[dict] = [None] * len(tasks)  # type: ignore[list-item]

    def run(idx_task):
        idx, (name, method, seed) = idx_task
        rows[idx] = _run_row(spec, name, graphs[name], method, seed)

    if tasks:
        with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
            list(pool.map(run, enumerate(tasks)))
    metadata = {
        "config_digest": spec.digest(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "tool_version": __version__,
    }
    return BenchReport(rows=tuple(rows), metadata=metadata)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: BenchReport, format: str = "csv") -> bytes:
    """Serialize a report; rows keep their (instance, method, seed) order."""
    if format == "csv":
        lines = [CSV_HEADER]
        for row in report.rows:
            lines.append(
                ",".join(_csv_cell(row[key]) for key in CSV_HEADER.split(","))
            )
        return ("\n".join(lines) + "\n").encode()
    if format == "json":
        doc = {"metadata": report.metadata, "rows": list(report.rows)}
        return (json.dumps(doc, indent=2) + "\n").encode()
    raise ValueError(f"unknown report format {format!r}, expected csv or json")
