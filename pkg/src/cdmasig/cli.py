"""
Command-line front end.

Subcommands: optimize, evaluate, enlarge, decode, experiment, registry-list.
Exit codes: 0 success, 1 runtime failure, 2 usage error. Relative output
paths resolve against ``$CDMASIG_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import registry
from .core import CdmaError, ChannelParams, SignatureMatrix, load_matrix
from .criteria import DEFAULT_BER_BITS, DEFAULT_REPORT_SAMPLES, DEFAULT_SEARCH_SAMPLES, Criterion, CriterionSpec
from .enlarge import EnlargementPlan, enlarge, tensor_decode
from .harness import (
    Experiment,
    ExperimentConfig,
    evaluation_records,
    output_dir,
    records_to_csv,
    rows_to_csv,
    run_experiment,
    summarize,
    write_atomic,
)
from .optimize import GaConfig, PsoConfig, make_cost, run_ga, run_pso


class UsageError(Exception):
    pass


def _out_path(path) -> Path:
    path = Path(path)
    return path if path.is_absolute() else output_dir() / path


def _dims(text: str) -> tuple[int, int]:
    match = re.fullmatch(r"\s*(\d+)\s*[xX,]\s*(\d+)\s*", text)
    if not match:
        raise argparse.ArgumentTypeError(f"expected MxN, got {text!r}")
    return int(match.group(1)), int(match.group(2))


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in re.split(r"[,\s]+", text.strip()) if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in re.split(r"[,\s]+", text.strip()) if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _criteria(text: str) -> list[str]:
    names = [v.strip().lower() for v in text.split(",") if v.strip()]
    valid = {c.value for c in Criterion}
    bad = [v for v in names if v not in valid]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown criteria {bad}; choose from {sorted(valid)}")
    return names


def _resolve_matrix(args) -> tuple[str, SignatureMatrix]:
    if getattr(args, "id", None):
        entry = registry.get(args.id)
        return entry.id, entry.matrix
    if getattr(args, "matrix", None):
        return Path(args.matrix).stem, load_matrix(args.matrix)
    raise UsageError("give a matrix file with --matrix or a registry id with --id")


def read_received(path) -> np.ndarray:
    """
    Received vectors from CSV: one real per line gives a single vector,
    otherwise each line is one vector.
    """
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(v) for v in re.split(r"[,\s]+", line) if v])
        except ValueError:
            raise CdmaError(f"{path}: non-numeric entry in {line!r}") from None
    if not rows:
        raise CdmaError(f"{path}: no received values")
    if all(len(r) == 1 for r in rows):
        return np.array([[r[0] for r in rows]])
    if len({len(r) for r in rows}) != 1:
        raise CdmaError(f"{path}: rows have different lengths")
    return np.array(rows)


# -- subcommands -----------------------------------------------------------

def cmd_optimize(args) -> int:
    crit = Criterion(args.criterion)
    if args.algo == "pso" and args.alphabet == "binary":
        raise UsageError("PSO searches real-valued matrices only; use --algo ga for binary")
    if crit is Criterion.BER:
        budget = DEFAULT_BER_BITS if args.full else args.ber_bits
    else:
        budget = DEFAULT_REPORT_SAMPLES if args.full else args.samples
    spec = CriterionSpec(crit, ChannelParams.at_ebn0(args.ebn0), budget, args.seed)
    cost = make_cost(spec)
    if args.algo == "ga":
        cfg = GaConfig(population_size=args.population, max_iterations=args.iterations,
                       alphabet=args.alphabet, seed=args.seed)
        trace = run_ga(args.m, args.n, cost, cfg)
    else:
        cfg = PsoConfig(particle_count=args.population, max_iterations=args.iterations, seed=args.seed)
        trace = run_pso(args.m, args.n, cost, cfg)

    out = _out_path(args.out)
    trace_path = _out_path(args.trace) if args.trace else out.with_suffix(".trace.csv")
    write_atomic(out, json.dumps(trace.final_matrix.to_dict(), indent=2) + "\n", args.overwrite)
    write_atomic(trace_path, trace.to_csv(), args.overwrite)
    print(f"{args.algo} {crit.value}: final cost {trace.final_cost!r} after {trace.iterations} iterations",
          file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    matrix_id, matrix = _resolve_matrix(args)
    records = evaluation_records(matrix_id, matrix, args.criterion, args.ebn0,
                                 args.samples, args.seed, per_user=args.per_user)
    text = records_to_csv(records)
    if args.out:
        write_atomic(_out_path(args.out), text, args.overwrite)
    else:
        sys.stdout.write(text)
    return 0


def _plan_from_args(args) -> EnlargementPlan:
    if getattr(args, "plan", None):
        return EnlargementPlan.from_dict(json.loads(Path(args.plan).read_text()))
    _, base = _resolve_matrix(args)
    if args.k is None:
        raise UsageError("give --k (or --plan)")
    return enlarge(base, args.k)


def cmd_enlarge(args) -> int:
    plan = _plan_from_args(args)
    write_atomic(_out_path(args.out), json.dumps(plan.enlarged.to_dict(), indent=2) + "\n", args.overwrite)
    if args.plan_out:
        write_atomic(_out_path(args.plan_out), json.dumps(plan.to_dict(), indent=2) + "\n", args.overwrite)
    return 0


def cmd_decode(args) -> int:
    plan = _plan_from_args(args)
    Y = read_received(args.received)
    X = tensor_decode(plan, Y)
    text = "".join(" ".join(str(int(v)) for v in row) + "\n" for row in X)
    if args.out:
        write_atomic(_out_path(args.out), text, args.overwrite)
    else:
        sys.stdout.write(text)
    return 0


def cmd_experiment(args) -> int:
    if args.config:
        data = json.loads(Path(args.config).read_text())
    elif args.experiment:
        data = {"experiment": args.experiment}
    else:
        raise UsageError("give --config or --experiment")
    overrides = {
        "dims": args.dims, "ebn0_grid_db": args.ebn0, "criteria": args.criteria,
        "algos": args.algos, "alphabets": args.alphabets, "seeds": args.seeds,
        "iterations": args.iterations, "population": args.population,
        "search_samples": args.samples, "report_samples": args.report_samples,
        "jobs": args.jobs, "output_path": args.out,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.full:
        data["search_samples"] = DEFAULT_REPORT_SAMPLES
        data["search_ber_bits"] = DEFAULT_BER_BITS
    cfg = ExperimentConfig.from_dict(data)
    rows = run_experiment(cfg)
    summary = summarize(rows)
    summary["config"] = cfg.to_dict()

    out = _out_path(cfg.output_path or f"{cfg.experiment.value}.csv")
    write_atomic(out, rows_to_csv(rows), args.overwrite)
    write_atomic(out.with_suffix(".summary.json"), json.dumps(summary, indent=2) + "\n", args.overwrite)
    failed = summary["failed"]
    if failed:
        print(f"{failed} of {len(rows)} rows failed; see the status column in {out}", file=sys.stderr)
    return 1 if failed == len(rows) else 0


def cmd_registry_list(args) -> int:
    for rid, entry in registry.REGISTRY.items():
        p = entry.provenance
        m, n = entry.matrix.shape
        print(f"{rid}\t{m}x{n}\t{entry.matrix.alphabet.value}\ttable {p.table}\t{p.criterion}\t"
              f"{p.optimizer}\t{p.design_ebn0_db:g} dB")
    return 0


# -- parser ----------------------------------------------------------------

def _add_matrix_source(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--matrix", help="matrix JSON file")
    src.add_argument("--id", help="registry id, e.g. tabIII.A5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdmasig", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    criteria = [c.value for c in Criterion]

    p = sub.add_parser("optimize", help="search for a signature matrix")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--criterion", choices=criteria, required=True)
    p.add_argument("--ebn0", type=float, required=True, help="design Eb/N0 in dB")
    p.add_argument("--algo", choices=["ga", "pso"], default="ga")
    p.add_argument("--alphabet", choices=["real", "binary"], default="real")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--population", type=int, default=20)
    p.add_argument("--samples", type=int, default=DEFAULT_SEARCH_SAMPLES, help="capacity draws per evaluation")
    p.add_argument("--ber-bits", type=int, default=100_000, help="BER bits per evaluation")
    p.add_argument("--full", action="store_true", help="use full evaluation budgets")
    p.add_argument("--out", required=True, help="output matrix JSON")
    p.add_argument("--trace", help="trace CSV (default: <out>.trace.csv)")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evaluate", help="evaluate criteria for a matrix")
    _add_matrix_source(p)
    p.add_argument("--criterion", type=_criteria, default=["capacity"],
                   help="comma-separated criteria")
    p.add_argument("--ebn0", type=_floats, default=[8.0], help="comma-separated Eb/N0 values in dB")
    p.add_argument("--samples", type=int, default=DEFAULT_REPORT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-user", action="store_true", help="report capacity per user")
    p.add_argument("--out", help="CSV output (default: stdout)")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("enlarge", help="Kronecker-enlarge a matrix with a Hadamard generator")
    _add_matrix_source(p)
    p.add_argument("--k", type=int, help="enlargement factor (power of two)")
    p.add_argument("--plan", help="enlargement plan JSON instead of --matrix/--id and --k")
    p.add_argument("--out", required=True, help="enlarged matrix JSON")
    p.add_argument("--plan-out", help="also write the enlargement plan JSON")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_enlarge)

    p = sub.add_parser("decode", help="block-decode received vectors of an enlarged matrix")
    _add_matrix_source(p)
    p.add_argument("--k", type=int)
    p.add_argument("--plan")
    p.add_argument("--received", required=True, help="CSV of received vectors")
    p.add_argument("--out", help="decoded bits (default: stdout)")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("experiment", help="run a sweep")
    p.add_argument("--config", help="ExperimentConfig JSON")
    p.add_argument("--experiment", choices=[e.value for e in Experiment])
    p.add_argument("--dims", type=_dims, nargs="+", help="sizes as MxN")
    p.add_argument("--ebn0", type=_floats)
    p.add_argument("--criteria", type=_criteria)
    p.add_argument("--algos", type=lambda s: s.split(","))
    p.add_argument("--alphabets", type=lambda s: s.split(","))
    p.add_argument("--seeds", type=_ints)
    p.add_argument("--iterations", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--samples", type=int, help="capacity draws per evaluation during search")
    p.add_argument("--report-samples", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--full", action="store_true")
    p.add_argument("--out", help="results CSV (summary JSON written alongside)")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("registry-list", help="list built-in matrices")
    p.set_defaults(func=cmd_registry_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (CdmaError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"cdmasig: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
