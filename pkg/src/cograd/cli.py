"""Command-line interface.

Subcommands: gen (d-regular generation), solve (GCN solver on one
instance), dfl (end-to-end predict-then-optimize), oracle (brute force),
bench (suite runner). A JSON config file can supply any long flag by name
("lambda", "observe", "polish", ...); explicit flags win over the file.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .bench import (
    CSV_HEADER,
    InstanceSpec,
    SuiteSpec,
    _csv_cell,
    emit_report,
    relative_error,
    run_suite,
)
from .gnn import TrainConfig, TrainingDivergedError, project_and_repair, train
from .graph import GsetFormatError, generate_d_regular, load_gset, write_gset
from .pipeline import PipelineConfig, end_to_end_solve
from .qubo import (
    ProblemKind,
    brute_force_optimum,
    build_qubo,
    is_feasible,
    objective,
)
from .reference import best_known

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract reserves 2 for data errors
    def error(self, message):
        raise _UsageError(message)


_DEFAULTS: dict[str, dict] = {
    "gen": {"n": None, "d": None, "seed": 0, "out": None},
    "solve": {
        "problem": None,
        "input": None,
        "seed": 0,
        "epochs": None,
        "lr": None,
        "penalty": 2.0,
        "polish": True,
        "d0": None,
        "d1": None,
        "format": "json",
        "out": None,
    },
    "dfl": {
        "problem": None,
        "input": None,
        "seed": 0,
        "epochs": None,
        "lr": None,
        "lam": 1.0,
        "observe": 0.8,
        "penalty": 2.0,
        "polish": True,
        "d0": None,
        "d1": None,
        "format": "json",
        "out": None,
    },
    "oracle": {"problem": None, "input": None, "format": "json", "out": None},
    "bench": {
        "problem": None,
        "instances": None,
        "methods": None,
        "seed": 0,
        "seeds": 1,
        "epochs": None,
        "lr": None,
        "lam": 1.0,
        "observe": 0.8,
        "penalty": 2.0,
        "polish": True,
        "d0": None,
        "d1": None,
        "format": "csv",
        "out": None,
    },
}

# config-file key -> argparse dest, where they differ
_KEY_ALIASES = {"lambda": "lam"}


def _build_parser() -> _Parser:
    ap = _Parser(prog="cograd", description="QUBO solving on graphs")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS

    def common(p, *, problem=True, fmt=True):
        p.add_argument("--config", default=None, help="JSON file of flag values")
        if problem:
            p.add_argument("--problem", choices=[k.value for k in ProblemKind], default=S)
            p.add_argument("--input", default=S, help="instance file, edge-list format")
        if fmt:
            p.add_argument("--format", choices=["csv", "json"], default=S)
        p.add_argument("--out", default=S, help="output path (default stdout)")

    gen = sub.add_parser("gen", help="generate a d-regular instance")
    gen.add_argument("--n", type=int, default=S)
    gen.add_argument("--d", type=int, default=S)
    gen.add_argument("--seed", type=int, default=S)
    common(gen, problem=False, fmt=False)

    def solver_flags(p, pipeline: bool):
        p.add_argument("--seed", type=int, default=S)
        p.add_argument("--epochs", type=int, default=S)
        p.add_argument("--lr", type=float, default=S)
        p.add_argument("--penalty", type=float, default=S)
        p.add_argument("--polish", action=argparse.BooleanOptionalAction, default=S)
        if pipeline:
            p.add_argument("--lambda", dest="lam", type=float, default=S)
            p.add_argument("--observe", type=float, default=S)

    solve = sub.add_parser("solve", help="run the GCN solver on one instance")
    solver_flags(solve, pipeline=False)
    common(solve)

    dfl = sub.add_parser("dfl", help="predict the graph, then solve on it")
    solver_flags(dfl, pipeline=True)
    common(dfl)

    oracle = sub.add_parser("oracle", help="exhaustive optimum (small n)")
    common(oracle)

    bench = sub.add_parser("bench", help="run a benchmark suite")
    bench.add_argument("--seeds", type=int, default=S, help="number of seeds")
    solver_flags(bench, pipeline=True)
    common(bench)
    return ap


def _merge_options(ns: argparse.Namespace) -> dict:
    cmd = ns.command
    opts = dict(_DEFAULTS[cmd])
    if ns.config is not None:
        path = Path(ns.config)
        if not path.exists():
            raise _UsageError(f"config file not found: {ns.config}")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise _UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise _UsageError("config file must hold a JSON object")
        for key, value in doc.items():
            dest = _KEY_ALIASES.get(key, key.replace("-", "_"))
            if dest not in opts:
                raise _UsageError(f"config key {key!r} not valid for {cmd!r}")
            opts[dest] = value
    for dest, value in vars(ns).items():
        if dest not in ("command", "config"):
            opts[dest] = value
    return opts


def _require(opts: dict, *names: str):
    for name in names:
        if opts.get(name) is None:
            flag = "--" + {"lam": "lambda"}.get(name, name)
            raise _UsageError(f"{flag} is required (flag or config)")


def _write_out(data: bytes, out: str | None):
    if out is None:
        sys.stdout.write(data.decode())
    else:
        Path(out).write_bytes(data)


def _instance_name(path: str) -> str:
    return Path(path).name.partition(".")[0]


def _train_cfg(opts: dict) -> TrainConfig:
    kw: dict = {"seed": int(opts["seed"])}
    if opts["epochs"] is not None:
        kw["max_epochs"] = int(opts["epochs"])
    if opts["lr"] is not None:
        kw["learning_rate"] = float(opts["lr"])
    if opts.get("d0") is not None:
        kw["d0"] = int(opts["d0"])
    if opts.get("d1") is not None:
        kw["d1"] = int(opts["d1"])
    return TrainConfig(**kw)


def _emit_row(row: dict, fmt: str, out: str | None):
    if fmt == "csv":
        cells = ",".join(_csv_cell(row[k]) for k in CSV_HEADER.split(","))
        data = (CSV_HEADER + "\n" + cells + "\n").encode()
    else:
        data = (json.dumps(row) + "\n").encode()
    _write_out(data, out)


def _row_for(
    opts: dict, method: str, obj: float, feasible: bool, n: int, m: int,
    runtime_ms: float, seed: int, assignment=None,
) -> dict:
    name = _instance_name(opts["input"])
    kind = ProblemKind(opts["problem"])
    ref = best_known(name)
    row = {
        "instance": name,
        "n": n,
        "m": m,
        "method": method,
        "objective": float(obj),
        "feasible": bool(feasible),
        "runtime_ms": runtime_ms,
        "seed": seed,
        "epsilon": relative_error(obj, ref, kind.maximize) if ref else None,
    }
    if assignment is not None:
        row["assignment"] = [int(b) for b in assignment]
    return row


def _cmd_gen(opts: dict) -> int:
    _require(opts, "n", "d")
    g = generate_d_regular(int(opts["n"]), int(opts["d"]), int(opts["seed"]))
    _write_out(write_gset(g).encode(), opts["out"])
    return 0


def _cmd_solve(opts: dict) -> int:
    _require(opts, "problem", "input")
    kind = ProblemKind(opts["problem"])
    g = load_gset(opts["input"])
    t0 = time.perf_counter()
    q = build_qubo(kind, g, float(opts["penalty"]))
    soft, _ = train(g, q, _train_cfg(opts))
    x = project_and_repair(kind, g, soft, polish=bool(opts["polish"]))
    ms = (time.perf_counter() - t0) * 1000.0
    row = _row_for(
        opts, "gnn-solver", objective(kind, g, x), is_feasible(kind, g, x),
        g.n, g.m, ms, int(opts["seed"]), assignment=x,
    )
    _emit_row(row, opts["format"], opts["out"])
    return 0


def _cmd_dfl(opts: dict) -> int:
    _require(opts, "problem", "input")
    g = load_gset(opts["input"])
    cfg = PipelineConfig(
        kind=ProblemKind(opts["problem"]),
        observe_fraction=float(opts["observe"]),
        lam=float(opts["lam"]),
        predictor_cfg=TrainConfig(seed=int(opts["seed"])),
        solver_cfg=_train_cfg(opts),
        seed=int(opts["seed"]),
        penalty=float(opts["penalty"]),
        polish=bool(opts["polish"]),
    )
    res = end_to_end_solve(g, cfg)
    if opts["format"] == "csv":
        row = _row_for(
            opts, "dfl-pipeline", res.objective_true, res.feasible_true,
            g.n, g.m, res.runtime_ms, int(opts["seed"]),
        )
        _emit_row(row, "csv", opts["out"])
    else:
        _write_out((res.to_json() + "\n").encode(), opts["out"])
    return 0


def _cmd_oracle(opts: dict) -> int:
    _require(opts, "problem", "input")
    kind = ProblemKind(opts["problem"])
    g = load_gset(opts["input"])
    t0 = time.perf_counter()
    x, val = brute_force_optimum(kind, g)
    ms = (time.perf_counter() - t0) * 1000.0
    row = _row_for(opts, "oracle", val, True, g.n, g.m, ms, 0, assignment=x)
    _emit_row(row, opts["format"], opts["out"])
    return 0


def _cmd_bench(opts: dict) -> int:
    _require(opts, "problem", "instances", "methods")
    if not isinstance(opts["instances"], list):
        raise _UsageError("bench config must list instances")
    if not isinstance(opts["methods"], list):
        raise _UsageError("bench config must list methods")
    try:
        instances = tuple(InstanceSpec(**d) for d in opts["instances"])
    except TypeError as exc:
        raise _UsageError(f"bad instance entry: {exc}") from exc
    base = int(opts["seed"])
    spec = SuiteSpec(
        problem=ProblemKind(opts["problem"]),
        instances=instances,
        methods=tuple(opts["methods"]),
        seeds=tuple(range(base, base + int(opts["seeds"]))),
        penalty=float(opts["penalty"]),
        polish=bool(opts["polish"]),
        observe_fraction=float(opts["observe"]),
        lam=float(opts["lam"]),
        epochs=opts["epochs"],
        lr=opts["lr"],
        d0=opts.get("d0"),
        d1=opts.get("d1"),
    )
    _write_out(emit_report(run_suite(spec), opts["format"]), opts["out"])
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "dfl": _cmd_dfl,
    "oracle": _cmd_oracle,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        opts = _merge_options(ns)
        return _COMMANDS[ns.command](opts)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except TrainingDivergedError as exc:
        print(f"solver diverged: {exc}", file=sys.stderr)
        return 3
    except (FileNotFoundError, GsetFormatError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
