import random

import pytest

from mapf_collapse import Graph, InfeasibleInputError, cost_moves, validate
from mapf_collapse.pipeline import OptimizeConfig, optimize_schedule, strip_timing
from mapf_collapse.reduction import reduce_independent_set

from helpers import random_rollout_instance, schedule_from_paths, single_edge_graph

STATS_FIELDS = {
    "n_actions",
    "n_mutex",
    "n_implications",
    "n_invalid",
    "saving",
    "cost_before",
    "cost_after",
    "soc_before",
    "soc_after",
    "saving_ratio",
    "optimal",
    "build_time_ms",
    "solve_time_ms",
    "nodes_explored",
}


def test_stats_contract_fields():
    red = reduce_independent_set(single_edge_graph(), 1)
    result = optimize_schedule(red.schedule, red.graph)
    assert STATS_FIELDS <= set(result.stats)
    assert result.stats["config"]["time_limit_ms"] == 5000
    assert result.stats["saving"] == 6
    assert result.stats["saving_ratio"] == pytest.approx(0.6)


def test_pipeline_rejects_infeasible():
    g = Graph(["A", "B"], [("A", "B")])
    s = schedule_from_paths([["A", "B"], ["B", "A"]])
    with pytest.raises(InfeasibleInputError):
        optimize_schedule(s, g, OptimizeConfig(mode="relaxed"))


def test_saving_accounting_includes_filter():
    rng = random.Random(97)
    for _ in range(20):
        s, g, _ = random_rollout_instance(rng, noise=0.6, horizon=12)
        result = optimize_schedule(s, g, OptimizeConfig(mode="relaxed"))
        st = result.stats
        assert st["saving"] == st["aba_removed_moves"] + st["ilp_saving"]
        assert st["cost_before"] - st["cost_after"] == st["saving"]
        assert cost_moves(result.schedule) == st["cost_after"]
        assert validate(result.schedule, g, "relaxed").feasible


def test_stats_deterministic_modulo_timing():
    rng = random.Random(101)
    s, g, _ = random_rollout_instance(rng, noise=0.5, horizon=16, n_agents=4)
    config = OptimizeConfig(mode="relaxed")
    a = optimize_schedule(s, g, config)
    b = optimize_schedule(s, g, config)
    assert strip_timing(a.stats) == strip_timing(b.stats)
    assert a.schedule == b.schedule


def test_custom_solver_hook():
    calls = []

    def recording_solver(model, limit):
        from mapf_collapse.ilp import solve_exact

        calls.append(limit)
        return solve_exact(model, limit)

    red = reduce_independent_set(single_edge_graph(), 1)
    config = OptimizeConfig(time_limit_ms=1234, solver=recording_solver)
    result = optimize_schedule(red.schedule, red.graph, config)
    assert calls == [pytest.approx(1.234)]
    assert result.stats["saving"] == 6
