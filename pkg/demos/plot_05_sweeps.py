"""
Experiment sweeps
=================

A sweep optimizes one matrix per grid point and scores it with a
high-sample per-user capacity estimate. This version uses small budgets;
the command line runs the same sweeps at full size.
"""

from cdmasig.harness import ExperimentConfig, rows_to_csv, run_experiment, summarize

cfg = ExperimentConfig(
    "DistanceCompare",
    ebn0_grid_db=[2, 5, 8, 11],
    iterations=30,
    report_samples=20_000,
)
rows = run_experiment(cfg)
print(rows_to_csv(rows))

# Every row carries the seed that reproduces it.
for g in summarize(rows)["groups"]:
    print(g["criterion"], g["ebn0_db"], round(g["mean"], 4))
