import random

import pytest

from mapf_collapse import (
    ConsistencyError,
    Graph,
    IlpModel,
    apply_solution,
    build_model,
    build_relations,
    cost_moves,
    generate_candidates,
    soc,
    solve_exact,
    solve_greedy,
    validate,
)
from mapf_collapse.candidates import EXHAUSTIVE, REDUCED
from mapf_collapse.ilp import CollapseSolution
from mapf_collapse.oracle import brute_force_collapse
from mapf_collapse.reduction import reduce_independent_set

from helpers import (
    positive_exhaustive_count,
    random_rollout_instance,
    schedule_from_paths,
    single_edge_graph,
)


def gadget_pipeline():
    red = reduce_independent_set(single_edge_graph(), 1)
    cands = generate_candidates(red.schedule, REDUCED)
    rel = build_relations(red.schedule, cands)
    return red, cands, build_model(rel, cands)


def mutual_oscillation():
    g = Graph(["A", "B", "C"], [("A", "B"), ("C", "A")])
    s = schedule_from_paths([["A", "B", "A"], ["C", "A", "C"]])
    cands = generate_candidates(s, REDUCED)
    rel = build_relations(s, cands)
    return s, g, cands, build_model(rel, cands)


# ------------------------------------------------------------- build_model


def test_build_model_gadget_shape():
    _, cands, model = gadget_pipeline()
    assert model.n_vars == 4
    assert len(model.mutex) == 1
    assert len(model.implications) == 2
    assert model.fixed_zero == frozenset()


def test_build_model_empty():
    s = schedule_from_paths([["A", "A"]])
    cands = generate_candidates(s, REDUCED)
    model = build_model(build_relations(s, cands), cands)
    assert model.n_vars == 0


def test_build_model_invalid_action_fixed():
    g = Graph(["A", "B", "C", "D"], [("A", "B"), ("C", "A"), ("A", "D")])
    s = schedule_from_paths([["A", "B", "A"], ["C", "A", "D"]])
    cands = generate_candidates(s, REDUCED)
    model = build_model(build_relations(s, cands), cands)
    # the passer-through agent repeats no vertex, so only the oscillating
    # agent contributes a variable, and it is unusable
    assert model.n_vars == 1
    assert model.fixed_zero == frozenset({0})
    assert model.mutex == () and model.implications == ()


def test_build_model_fixes_zero_weight_exhaustive_candidates():
    s = schedule_from_paths([list("AAABAAA")])
    cands = generate_candidates(s, EXHAUSTIVE)
    model = build_model(build_relations(s, cands), cands)
    for i, c in enumerate(cands.actions):
        assert (c.weight == 0) == (i in model.fixed_zero)
    assert all(model.weights[i] >= 1 for i in range(model.n_vars) if i not in model.fixed_zero)


# ------------------------------------------------------------- solve_exact


def test_solve_exact_gadget():
    red, cands, model = gadget_pipeline()
    sol = solve_exact(model, 10.0)
    assert sol.saving == 6 and sol.optimal
    picked = {(cands.actions[i].agent, cands.actions[i].a, cands.actions[i].b) for i in sol.selected}
    assert picked in ({(0, 0, 6), (2, 0, 4)}, {(1, 0, 6), (2, 2, 6)})


def test_solve_exact_mutual_oscillation():
    s, g, cands, model = mutual_oscillation()
    sol = solve_exact(model, 10.0)
    assert sol.saving == 4
    assert sol.selected == frozenset({0, 1})


def test_solve_exact_empty_model():
    model = IlpModel((), (), (), frozenset())
    sol = solve_exact(model, 1.0)
    assert sol.saving == 0 and sol.selected == frozenset() and sol.optimal


def test_solve_exact_deterministic():
    _, _, model = gadget_pipeline()
    a = solve_exact(model, 10.0)
    b = solve_exact(model, 10.0)
    assert a.selected == b.selected and a.saving == b.saving
    assert a.nodes_explored == b.nodes_explored


def test_solve_exact_anytime_zero_budget():
    _, cands, model = gadget_pipeline()
    sol = solve_exact(model, 0.0)
    # whatever the limit, the produced selection satisfies all constraints
    assert sol.saving >= 0
    for a, b in model.mutex:
        assert not (a in sol.selected and b in sol.selected)
    for owner, suitable in model.implications:
        if owner in sol.selected:
            assert any(s in sol.selected for s in suitable)


# ------------------------------------------------------------ solve_greedy


def test_solve_greedy_gadget():
    _, _, model = gadget_pipeline()
    sol = solve_greedy(model)
    assert sol.saving == 6


def test_solve_greedy_unsatisfiable_dependency():
    # the only positive action depends on a fixed-zero action
    model = IlpModel(
        weights=(3, 2),
        mutex=(),
        implications=((0, (1,)),),
        fixed_zero=frozenset({1}),
    )
    sol = solve_greedy(model)
    assert sol.saving == 0 and sol.selected == frozenset()
    exact = solve_exact(model, 5.0)
    assert exact.saving == 0 and exact.optimal


def test_solve_greedy_unconstrained_takes_everything():
    model = IlpModel((2, 3, 4), (), (), frozenset())
    sol = solve_greedy(model)
    assert sol.selected == frozenset({0, 1, 2})
    assert sol.saving == 9 and sol.optimal


def test_greedy_respects_constraints_randomized():
    rng = random.Random(37)
    for _ in range(60):
        s, g, _ = random_rollout_instance(rng, noise=0.6)
        cands = generate_candidates(s, REDUCED)
        model = build_model(build_relations(s, cands), cands)
        sol = solve_greedy(model)
        assert sol.selected.isdisjoint(model.fixed_zero)
        for a, b in model.mutex:
            assert not (a in sol.selected and b in sol.selected)
        for owner, suitable in model.implications:
            if owner in sol.selected:
                assert any(x in sol.selected for x in suitable)
        applied = apply_solution(s, cands, sol, g, "relaxed")
        assert cost_moves(applied) == cost_moves(s) - sol.saving


# ---------------------------------------------------------- apply_solution


def test_apply_solution_gadget_first_option():
    red, cands, model = gadget_pipeline()
    ids = {(c.agent, c.a, c.b): i for i, c in enumerate(cands.actions)}
    sol = CollapseSolution(frozenset({ids[(0, 0, 6)], ids[(2, 0, 4)]}), 6, True)
    out = apply_solution(red.schedule, cands, sol, red.graph, "strict")
    assert out.agents[0].path == tuple(["x_u1"] * 7)
    assert out.agents[2].path == ("a_e1",) * 5 + ("x_u2", "b_e1")
    assert cost_moves(out) == 4
    assert soc(out) == 12


def test_apply_solution_empty_selection():
    red, cands, _ = gadget_pipeline()
    sol = CollapseSolution(frozenset(), 0, True)
    out = apply_solution(red.schedule, cands, sol, red.graph, "strict")
    assert out == red.schedule


def test_apply_solution_mutual_oscillation_both():
    s, g, cands, model = mutual_oscillation()
    sol = solve_exact(model, 5.0)
    out = apply_solution(s, cands, sol, g, "relaxed")
    assert out.agents[0].path == ("A", "A", "A")
    assert out.agents[1].path == ("C", "C", "C")
    assert cost_moves(out) == 0


def test_apply_solution_rejects_bad_selection():
    s, g, cands, _ = mutual_oscillation()
    # selecting only the A-collapse parks agent 0 on the crossing vertex
    bad = CollapseSolution(frozenset({0}), 2, True)
    with pytest.raises(ConsistencyError):
        apply_solution(s, cands, bad, g, "relaxed")


# ---------------------------------------------------------------- properties


def test_exactness_against_oracle_quick():
    rng = random.Random(41)
    checked = 0
    while checked < 60:
        s, g, _ = random_rollout_instance(rng, noise=rng.choice([0.3, 0.5, 0.8]))
        if positive_exhaustive_count(s) > 20:
            continue
        oracle = brute_force_collapse(s, g, "relaxed", cap=20)
        cands = generate_candidates(s, REDUCED)
        model = build_model(build_relations(s, cands), cands)
        sol = solve_exact(model, 30.0)
        assert sol.optimal
        assert sol.saving == oracle.best_saving
        greedy = solve_greedy(model)
        assert sol.saving >= greedy.saving
        applied = apply_solution(s, cands, sol, g, "relaxed")
        assert validate(applied, g, "relaxed").feasible
        assert cost_moves(applied) <= cost_moves(s)
        checked += 1
