"""
Searching for a matrix with GA and PSO
======================================

Both searches minimize a cost. Maximized criteria such as MD and capacity
are negated by ``make_cost``.
"""

from cdmasig.core import ChannelParams
from cdmasig.criteria import Criterion, CriterionSpec, per_user_capacity
from cdmasig.optimize import GaConfig, PsoConfig, make_cost, run_ga, run_pso

cost = make_cost(CriterionSpec(Criterion.MD))

ga = run_ga(4, 5, cost, GaConfig(seed=0))
pso = run_pso(4, 5, cost, PsoConfig(seed=0))

# Best and mean cost per generation; the population collapses onto the best.
for i in range(0, ga.iterations + 1, 10):
    print(f"gen {i:3d}  best {ga.best_cost[i]:.4f}  mean {ga.mean_cost[i]:.4f}")
print("GA final MD:", -ga.final_cost, "stopped by", ga.metadata["stopped"])
print("PSO final MD:", -pso.final_cost)

# Score both results on the quantity that matters: per-user capacity.
report = CriterionSpec(Criterion.CAPACITY, ChannelParams.at_ebn0(8.0), 100_000, seed=99)
for name, trace in [("ga", ga), ("pso", pso)]:
    c = per_user_capacity(trace.final_matrix, report)
    print(f"{name}: capacity/user {c.value:.4f} +- {c.std_error:.4f}")

# Binary matrices come from the GA with bit-flip mutation.
binary = run_ga(4, 5, cost, GaConfig(alphabet="binary", seed=0))
print(binary.final_matrix.entries, "MD", -binary.final_cost)
