import numpy as np
import pytest

from cdmasig.core import Alphabet, CdmaError, ChannelParams
from cdmasig.criteria import Criterion, CriterionSpec, ed, md
from cdmasig.optimize import GaConfig, PsoConfig, compare_algorithms, make_cost, run_ga, run_pso


def sphere(A):
    return float(np.sum(np.asarray(A) ** 2))


md_cost = make_cost(CriterionSpec(Criterion.MD))


def test_make_cost_directions(A4):
    assert md_cost(A4) == -md(A4).value
    ch = ChannelParams.at_ebn0(8.0)
    assert make_cost(CriterionSpec(Criterion.ED, ch))(A4) == ed(A4, ch).value
    candidates = [np.eye(2), np.ones((2, 2))]
    assert min(candidates, key=md_cost) is candidates[0]


def test_config_defaults_and_validation():
    ga = GaConfig()
    assert (ga.population_size, ga.elite_count, ga.crossover_fraction, ga.max_iterations) == (20, 2, 0.8, 100)
    assert ga.function_tolerance == 1e-6 and ga.bounds == (-1.0, 1.0)
    pso = PsoConfig()
    assert (pso.particle_count, pso.max_iterations, pso.bounds) == (20, 100, (-1.0, 1.0))
    assert (pso.inertia, pso.cognitive, pso.social) == (0.729, 1.494, 1.494)
    with pytest.raises(CdmaError):
        GaConfig(elite_count=20)
    with pytest.raises(CdmaError):
        PsoConfig(particle_count=0)


def check_trace(trace):
    best = np.array(trace.best_cost)
    assert np.all(np.diff(best) <= 0)
    assert trace.final_cost == trace.best_cost[-1]
    assert len(trace.mean_cost) == len(trace.best_cost)
    lo, hi = -1.0, 1.0
    assert np.all((trace.final_matrix.entries >= lo) & (trace.final_matrix.entries <= hi))


@pytest.mark.parametrize("runner, cfg", [(run_ga, GaConfig(seed=1)), (run_pso, PsoConfig(seed=1))])
def test_sphere(runner, cfg):
    trace = runner(3, 4, sphere, cfg)
    check_trace(trace)
    assert trace.iterations <= 100
    assert trace.final_cost < 1e-3
    assert sphere(trace.final_matrix.entries) == pytest.approx(trace.final_cost)


def test_ga_md_convergence():
    trace = run_ga(4, 5, md_cost, GaConfig(seed=0))
    check_trace(trace)
    assert trace.iterations <= 100
    assert abs(trace.best_cost[-1] - trace.mean_cost[-1]) < 1e-2


def test_pso_md_plateau():
    trace = run_pso(4, 5, md_cost, PsoConfig(seed=0))
    check_trace(trace)
    assert trace.iterations == 100
    assert len(set(trace.best_cost[-20:])) == 1


def test_pso_global_best_dominates_personal_bests():
    seen = []

    def cost(A):
        c = sphere(A)
        seen.append(c)
        return c

    trace = run_pso(2, 3, cost, PsoConfig(particle_count=8, max_iterations=15, seed=4))
    per_iter = np.array(seen).reshape(16, 8)
    # each pbest is the minimum of that particle's history
    pbest = np.minimum.accumulate(per_iter, axis=0)
    for t in range(16):
        assert trace.best_cost[t] <= pbest[t].min()
        assert trace.best_cost[t] == pbest[t].min()


def test_binary_ga_stays_binary():
    seen = []

    def cost(A):
        seen.append(np.array(A))
        return md_cost(A)

    trace = run_ga(4, 5, cost, GaConfig(alphabet=Alphabet.BINARY, max_iterations=30, seed=3))
    assert all(set(np.unique(A)) <= {-1.0, 1.0} for A in seen)
    assert trace.final_matrix.alphabet is Alphabet.BINARY
    check_trace(trace)


def test_ga_warm_start():
    warm = np.full((3, 4), 0.01)
    trace = run_ga(3, 4, sphere, GaConfig(warm_start=[warm], max_iterations=5, seed=2))
    assert trace.best_cost[0] <= sphere(warm)


def test_traces_are_deterministic():
    a = run_ga(2, 3, md_cost, GaConfig(seed=5, max_iterations=20))
    b = run_ga(2, 3, md_cost, GaConfig(seed=5, max_iterations=20))
    assert a.to_csv() == b.to_csv()
    assert a.final_matrix == b.final_matrix
    c = run_pso(2, 3, md_cost, PsoConfig(seed=5, max_iterations=20))
    d = run_pso(2, 3, md_cost, PsoConfig(seed=5, max_iterations=20))
    assert c.to_csv() == d.to_csv()


def test_trace_csv_and_metadata():
    trace = run_ga(2, 2, sphere, GaConfig(max_iterations=3, seed=0))
    lines = trace.to_csv().splitlines()
    assert lines[0] == "iteration,best_cost,mean_cost"
    assert len(lines) == trace.iterations + 2
    assert trace.metadata["migration_direction"] == "forward"
    assert trace.metadata["migration_fraction"] == 0.2


def test_compare_algorithms_identical_matrices_give_zero_delta():
    W = np.array([[0.3, -0.5, 0.9], [0.7, 0.2, -0.4]])
    specs = [CriterionSpec(Criterion.ED, ChannelParams.at_ebn0(db)) for db in (4.0, 8.0)]
    rows = compare_algorithms(
        2, 3, specs, seeds=[0, 1],
        ga_config=GaConfig(population_size=2, elite_count=1, max_iterations=0, warm_start=[W, W]),
        pso_config=PsoConfig(particle_count=1, max_iterations=0, warm_start=[W]),
        eval_samples=5000,
    )
    assert len(rows) == len(specs)
    for row in rows:
        assert row["delta_mean"] == 0.0
        assert row["delta_std"] == 0.0
        assert row["mc_error"] > 0


def test_compare_algorithms_needs_seeds():
    with pytest.raises(CdmaError):
        compare_algorithms(2, 3, [CriterionSpec(Criterion.ED, ChannelParams.at_ebn0(8.0))], seeds=[])


@pytest.mark.slow
@pytest.mark.parametrize("criterion", [Criterion.ED, Criterion.BER])
def test_ga_minus_pso_delta_small_for_ed_and_ber(criterion):
    samples = 10_000 if criterion is Criterion.BER else 20_000
    spec = CriterionSpec(criterion, ChannelParams.at_ebn0(8.0), samples)
    rows = compare_algorithms(
        3, 4, [spec], seeds=[0, 1, 2],
        ga_config=GaConfig(max_iterations=40), pso_config=PsoConfig(max_iterations=40),
        eval_samples=50_000,
    )
    row = rows[0]
    combined = np.hypot(row["delta_std"] / np.sqrt(3), row["mc_error"])
    assert abs(row["delta_mean"]) <= 3 * combined
