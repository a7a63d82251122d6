"""
Experiment sweeps and result records.

Every sweep optimizes matrices per (criterion, algorithm, alphabet, size,
Eb/N0, seed) grid point and scores the result with a high-sample per-user
capacity estimate at the design Eb/N0. Rows come back sorted by grid key,
whatever order the workers finish in.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from itertools import groupby
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import Alphabet, CdmaError, ChannelParams, SignatureMatrix
from .criteria import (
    DEFAULT_REPORT_SAMPLES,
    DEFAULT_SEARCH_SAMPLES,
    Criterion,
    CriterionSpec,
    evaluate,
    per_user_capacity,
)
from .optimize import GaConfig, PsoConfig, make_cost, run_ga, run_pso

__all__ = [
    "Experiment",
    "ExperimentConfig",
    "EvaluationRecord",
    "ExperimentRow",
    "OutputExistsError",
    "DEFAULT_EBN0_GRID",
    "evaluation_records",
    "records_to_csv",
    "rows_to_csv",
    "summarize",
    "run_experiment",
    "write_atomic",
    "output_dir",
]

DEFAULT_EBN0_GRID = [float(v) for v in range(13)]
SEARCH_BER_BITS = 100_000
# offset between the search seed and the seed of the final capacity estimate
REPORT_SEED_OFFSET = 1_000_003
OUTPUT_DIR_ENV = "CDMASIG_OUTPUT_DIR"


class OutputExistsError(CdmaError):
    pass


def output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def write_atomic(path, text: str, overwrite: bool = False) -> Path:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    if path.exists() and not overwrite:
        raise OutputExistsError(f"{path} exists; pass --overwrite to replace it")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# -- single-matrix evaluation -------------------------------------------------

@dataclass(frozen=True)
class EvaluationRecord:
    matrix_id: str
    criterion: str
    ebn0_db: float
    value: float
    std_error: float
    samples: int
    seed: int


def _spec(criterion: Criterion, ebn0_db: float, samples: int, seed: int) -> CriterionSpec:
    return CriterionSpec(criterion, ChannelParams.at_ebn0(ebn0_db), samples, seed)


def evaluation_records(
    matrix_id: str,
    matrix,
    criteria: Sequence[Criterion | str],
    ebn0_grid: Sequence[float],
    samples: int = DEFAULT_REPORT_SAMPLES,
    seed: int = 0,
    per_user: bool = False,
) -> list[EvaluationRecord]:
    """One record per (criterion, Eb/N0). Capacity may be reported per user."""
    records = []
    for crit in map(Criterion, criteria):
        for ebn0 in ebn0_grid:
            budget = samples if crit.stochastic else 0
            spec = _spec(crit, ebn0, max(samples, 1000), seed)
            if crit is Criterion.CAPACITY and per_user:
                val = per_user_capacity(matrix, spec)
            else:
                val = evaluate(matrix, spec)
            records.append(EvaluationRecord(matrix_id, crit.value, float(ebn0), val.value,
                                            val.std_error, budget, seed))
    return records


def _to_csv(items: Iterable, cls) -> str:
    names = [f.name for f in fields(cls)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for item in items:
        row = []
        for name in names:
            v = getattr(item, name)
            row.append(repr(v) if isinstance(v, float) else v)
        writer.writerow(row)
    return buf.getvalue()


def records_to_csv(records: Iterable[EvaluationRecord]) -> str:
    return _to_csv(records, EvaluationRecord)


# -- sweeps ----------------------------------------------------------------

class Experiment(str, Enum):
    DISTANCE_COMPARE = "DistanceCompare"
    CRITERIA_COMPARE = "CriteriaCompare"
    BETA_SWEEP = "BetaSweep"
    BINARY_VS_REAL = "BinaryVsReal"
    PSO_COMPARE = "PsoCompare"
    GA_MINUS_PSO = "GaMinusPso"


# dims, criteria, algorithms, alphabets, Eb/N0 grid (None = default grid)
_PRESETS = {
    Experiment.DISTANCE_COMPARE: ([(3, 4)], ["md", "qd", "ed"], ["ga"], ["real"], None),
    Experiment.CRITERIA_COMPARE: ([(2, 5)], ["capacity", "ber", "ed"], ["ga"], ["real"], None),
    Experiment.BETA_SWEEP: ([(3, 4), (3, 5), (2, 4), (2, 5)], ["capacity", "ber", "ed"], ["ga"], ["real"], [8.0]),
    Experiment.BINARY_VS_REAL: ([(4, 5)], ["capacity", "ed"], ["ga"], ["real", "binary"], None),
    Experiment.PSO_COMPARE: ([(2, 5)], ["capacity", "ber", "md", "ed"], ["pso"], ["real"], None),
    Experiment.GA_MINUS_PSO: ([(2, 5), (3, 4)], ["capacity", "ber", "md", "qd", "ed"], ["ga", "pso"], ["real"], None),
}


@dataclass
class ExperimentConfig:
    """
    Sweep description. Fields left as ``None`` take the experiment preset.

    ``search_samples`` and ``search_ber_bits`` are the per-evaluation budgets
    inside the optimizer; ``report_samples`` is the capacity budget for the
    final score of each optimized matrix.
    """

    experiment: Experiment
    dims: list | None = None
    ebn0_grid_db: list | None = None
    criteria: list | None = None
    algos: list | None = None
    alphabets: list | None = None
    seeds: list = field(default_factory=lambda: [0])
    output_path: str | None = None
    iterations: int = 100
    population: int = 20
    search_samples: int = DEFAULT_SEARCH_SAMPLES
    search_ber_bits: int = SEARCH_BER_BITS
    report_samples: int = DEFAULT_REPORT_SAMPLES
    jobs: int = 1

    def __post_init__(self):
        self.experiment = Experiment(self.experiment)
        dims, criteria, algos, alphabets, grid = _PRESETS[self.experiment]
        self.dims = [tuple(int(v) for v in d) for d in (self.dims or dims)]
        self.criteria = [Criterion(c).value for c in (self.criteria or criteria)]
        self.algos = [a.lower() for a in (self.algos or algos)]
        self.alphabets = [Alphabet(a).value for a in (self.alphabets or alphabets)]
        self.ebn0_grid_db = [float(v) for v in (self.ebn0_grid_db or grid or DEFAULT_EBN0_GRID)]
        self.seeds = [int(s) for s in self.seeds]
        if not (self.dims and self.criteria and self.algos and self.ebn0_grid_db and self.seeds):
            raise CdmaError("experiment grids must be non-empty")
        for a in self.algos:
            if a not in ("ga", "pso"):
                raise CdmaError(f"unknown algorithm {a!r}")
        for m, n in self.dims:
            if m < 1 or n < 1:
                raise CdmaError(f"invalid dimensions {m}x{n}")
        if self.experiment is Experiment.BETA_SWEEP and len({n / m for m, n in self.dims}) < 2:
            raise CdmaError("BetaSweep needs at least two loading factors")
        if self.experiment is Experiment.GA_MINUS_PSO and set(self.algos) != {"ga", "pso"}:
            raise CdmaError("GaMinusPso needs both ga and pso")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise CdmaError(f"unknown experiment config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["experiment"] = self.experiment.value
        out["dims"] = [list(d) for d in self.dims]
        return out

    def tasks(self) -> list[tuple]:
        keys = []
        for crit in self.criteria:
            for algo in self.algos:
                for alphabet in self.alphabets:
                    for m, n in self.dims:
                        for ebn0 in self.ebn0_grid_db:
                            for seed in self.seeds:
                                keys.append((crit, algo, alphabet, m, n, ebn0, seed))
        return sorted(keys)


@dataclass(frozen=True)
class ExperimentRow:
    experiment: str
    criterion: str
    algo: str
    alphabet: str
    m: int
    n: int
    ebn0_db: float
    seed: int
    per_user_capacity: float
    std_error: float
    status: str = "ok"

    @property
    def beta(self) -> float:
        return self.n / self.m


def _optimize(cfg: ExperimentConfig, crit: Criterion, algo: str, alphabet: str,
              m: int, n: int, ebn0: float, seed: int) -> SignatureMatrix:
    if crit is Criterion.BER:
        budget = cfg.search_ber_bits
    elif crit is Criterion.CAPACITY:
        budget = cfg.search_samples
    else:
        budget = DEFAULT_SEARCH_SAMPLES
    cost = make_cost(_spec(crit, ebn0, budget, seed))
    if algo == "ga":
        ga = GaConfig(population_size=cfg.population, max_iterations=cfg.iterations,
                      alphabet=alphabet, seed=seed)
        return run_ga(m, n, cost, ga).final_matrix
    if alphabet != Alphabet.REAL.value:
        raise CdmaError("PSO searches real-valued matrices only")
    pso = PsoConfig(particle_count=cfg.population, max_iterations=cfg.iterations, seed=seed)
    return run_pso(m, n, cost, pso).final_matrix


def _run_task(cfg: ExperimentConfig, key: tuple) -> ExperimentRow:
    crit, algo, alphabet, m, n, ebn0, seed = key
    try:
        matrix = _optimize(cfg, Criterion(crit), algo, alphabet, m, n, ebn0, seed)
        report = _spec(Criterion.CAPACITY, ebn0, cfg.report_samples, seed + REPORT_SEED_OFFSET)
        val = per_user_capacity(matrix, report)
        return ExperimentRow(cfg.experiment.value, crit, algo, alphabet, m, n, ebn0, seed,
                             val.value, val.std_error)
    except (CdmaError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return ExperimentRow(cfg.experiment.value, crit, algo, alphabet, m, n, ebn0, seed,
                             math.nan, math.nan, f"error: {exc}")


def run_experiment(cfg: ExperimentConfig) -> list[ExperimentRow]:
    """Run every grid point of ``cfg``; rows are ordered by grid key."""
    keys = cfg.tasks()
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_run_task, [cfg] * len(keys), keys))
    else:
        rows = [_run_task(cfg, k) for k in keys]
    return rows


def rows_to_csv(rows: Iterable[ExperimentRow]) -> str:
    return _to_csv(rows, ExperimentRow)


def summarize(rows: Sequence[ExperimentRow]) -> dict:
    """Mean and spread across seeds per grid point, plus GA-minus-PSO deltas when both ran."""

    def group_key(r):
        return (r.criterion, r.algo, r.alphabet, r.m, r.n, r.ebn0_db)

    ok = sorted((r for r in rows if r.status == "ok"), key=group_key)
    groups = []
    for key, items in groupby(ok, key=group_key):
        items = list(items)
        vals = np.array([r.per_user_capacity for r in items])
        errs = np.array([r.std_error for r in items])
        groups.append({
            "criterion": key[0], "algo": key[1], "alphabet": key[2], "m": key[3], "n": key[4],
            "ebn0_db": key[5], "seeds": [r.seed for r in items],
            "mean": float(vals.mean()),
            "std": float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
            "mc_error": float(np.sqrt(np.sum(errs ** 2)) / len(errs)),
        })

    deltas = []
    by_key = {(g["criterion"], g["algo"], g["alphabet"], g["m"], g["n"], g["ebn0_db"]): g for g in groups}
    for (crit, algo, alphabet, m, n, ebn0), g in by_key.items():
        if algo != "ga":
            continue
        p = by_key.get((crit, "pso", alphabet, m, n, ebn0))
        if p is None:
            continue
        ga_vals = {r.seed: r.per_user_capacity for r in ok if group_key(r) == (crit, "ga", alphabet, m, n, ebn0)}
        pso_vals = {r.seed: r.per_user_capacity for r in ok if group_key(r) == (crit, "pso", alphabet, m, n, ebn0)}
        paired = [ga_vals[s] - pso_vals[s] for s in sorted(set(ga_vals) & set(pso_vals))]
        deltas.append({
            "criterion": crit, "m": m, "n": n, "ebn0_db": ebn0,
            "delta_mean": float(np.mean(paired)),
            "delta_std": float(np.std(paired, ddof=1)) if len(paired) > 1 else 0.0,
            "mc_error": math.hypot(g["mc_error"], p["mc_error"]),
        })

    return {
        "rows": len(rows),
        "failed": sum(r.status != "ok" for r in rows),
        "groups": groups,
        "ga_minus_pso": deltas,
    }
