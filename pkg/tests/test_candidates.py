import random

import pytest

from mapf_collapse import (
    Graph,
    aba_prefilter,
    cost_moves,
    generate_candidates,
    validate,
)
from mapf_collapse.candidates import (
    EXHAUSTIVE,
    REDUCED,
    aba_prefilter_detailed,
    collapse_paths,
    prefix_moves,
)
from mapf_collapse.reduction import reduce_independent_set

from helpers import (
    line_graph,
    random_rollout_instance,
    schedule_from_paths,
    single_edge_graph,
)


def line_ab():
    return Graph(["A", "B"], [("A", "B")])


def actions_as_tuples(cands):
    return [(c.agent, c.a, c.b, c.x, c.weight) for c in cands.actions]


# ------------------------------------------------------------- generation


def test_exhaustive_aaabaaa():
    s = schedule_from_paths([list("AAABAAA")])
    cands = generate_candidates(s, EXHAUSTIVE)
    a_actions = [c for c in cands.actions if c.x == "A"]
    assert len(a_actions) == 15  # C(6,2) pairs over the six A visits
    assert len(cands.actions) == 15  # B appears once: no pair


def test_reduced_aaabaaa():
    s = schedule_from_paths([list("AAABAAA")])
    cands = generate_candidates(s, REDUCED)
    got = {(c.a, c.b) for c in cands.actions}
    assert got == {(0, 4), (0, 6), (2, 4), (2, 6)}
    assert all(c.weight == 2 for c in cands.actions)


def test_reduced_endpoint_pairs_before_pruning():
    # run endpoints of AAABAAA are {0,2,4,6}: C(4,2) pairs, two zero-weight
    s = schedule_from_paths([list("AAABAAA")])
    exhaustive = generate_candidates(s, EXHAUSTIVE)
    endpoints = {0, 2, 4, 6}
    endpoint_pairs = [
        c for c in exhaustive.actions if c.a in endpoints and c.b in endpoints and c.x == "A"
    ]
    assert len(endpoint_pairs) == 6
    reduced = generate_candidates(s, REDUCED)
    assert len(reduced.actions) == 4  # zero-weight endpoint pairs dropped


def test_reduced_edge_agent_block():
    red = reduce_independent_set(single_edge_graph(), 1)
    cands = generate_candidates(red.schedule, REDUCED)
    edge_actions = [(c.a, c.b, c.x, c.weight) for c in cands.actions if c.agent == 2]
    assert edge_actions == [(0, 4, "a_e1", 4), (2, 6, "b_e1", 4)]


def test_reduced_constant_path_empty():
    s = schedule_from_paths([["A", "A", "A", "A"]])
    assert len(generate_candidates(s, REDUCED).actions) == 0


def test_candidates_sorted_canonically():
    rng = random.Random(2)
    for _ in range(10):
        s, _, _ = random_rollout_instance(rng)
        for mode in (REDUCED, EXHAUSTIVE):
            cands = generate_candidates(s, mode)
            keys = [(c.agent, c.a, c.b) for c in cands.actions]
            assert keys == sorted(keys)
            for agent, idxs in cands.per_agent.items():
                assert all(cands.actions[i].agent == agent for i in idxs)


def test_reduced_subset_of_exhaustive():
    rng = random.Random(4)
    for _ in range(25):
        s, _, _ = random_rollout_instance(rng)
        exh = {(c.agent, c.a, c.b, c.x): c.weight for c in generate_candidates(s, EXHAUSTIVE).actions}
        for c in generate_candidates(s, REDUCED).actions:
            assert exh[(c.agent, c.a, c.b, c.x)] == c.weight


def test_single_action_application_effect():
    rng = random.Random(9)
    for _ in range(25):
        s, _, _ = random_rollout_instance(rng)
        cands = generate_candidates(s, REDUCED)
        for c in cands.actions:
            applied = collapse_paths(s, [c])
            before, after = s.agents[c.agent].path, applied.agents[c.agent].path
            for t in range(s.horizon + 1):
                if t <= c.a or t >= c.b:
                    assert after[t] == before[t]
                else:
                    assert after[t] == c.x
            assert cost_moves(s) - cost_moves(applied) == c.weight
            for j in range(s.n_agents):
                if j != c.agent:
                    assert applied.agents[j].path == s.agents[j].path


def test_prefix_moves():
    assert prefix_moves(tuple("AABBA")) == [0, 0, 1, 1, 2]


def test_invalid_mode_rejected():
    s = schedule_from_paths([["A", "A"]])
    with pytest.raises(ValueError):
        generate_candidates(s, "everything")


# ------------------------------------------------------------- aba filter


def test_aba_oscillation_smoothed():
    g = line_ab()
    s = schedule_from_paths([["A", "B", "A", "B", "A"]])
    filtered, passes = aba_prefilter_detailed(s, g)
    assert filtered.agents[0].path == ("A", "A", "A", "A", "A")
    assert cost_moves(s) - cost_moves(filtered) == 4
    assert passes == 2  # one rewriting pass plus the fixpoint check


def test_aba_blocked_by_occupant():
    # the blocker passes through A without an ABA pattern of its own
    g = Graph(["A", "B", "C", "D"], [("A", "B"), ("C", "A"), ("A", "D")])
    s = schedule_from_paths([["A", "B", "A"], ["C", "A", "D"]])
    filtered = aba_prefilter(s, g)
    assert filtered.agents[0].path == ("A", "B", "A")
    assert filtered.agents[1].path == ("C", "A", "D")


def test_aba_rewrite_unblocks_neighbor():
    # removing the second agent's own oscillation frees A for the first
    g = Graph(["A", "B", "C"], [("A", "B"), ("A", "C")])
    s = schedule_from_paths([["A", "B", "A"], ["C", "A", "C"]])
    filtered = aba_prefilter(s, g)
    assert filtered.agents[0].path == ("A", "A", "A")
    assert filtered.agents[1].path == ("C", "C", "C")


def test_aba_constant_path_unchanged():
    g = line_ab()
    s = schedule_from_paths([["A", "A", "A"]])
    assert aba_prefilter(s, g).agents[0].path == ("A", "A", "A")


def test_aba_respects_pass_cap():
    g = line_graph(2)
    path = ["v0", "v1"] * 8 + ["v0"]
    s = schedule_from_paths([path])
    capped, passes = aba_prefilter_detailed(s, g, max_passes=1)
    assert passes == 1
    full, _ = aba_prefilter_detailed(s, g)
    assert cost_moves(full) <= cost_moves(capped)


def test_aba_never_increases_cost_and_stays_valid():
    rng = random.Random(21)
    for _ in range(60):
        s, g, _ = random_rollout_instance(rng, noise=0.6)
        report = validate(s, g, "relaxed")
        assert report.feasible
        filtered = aba_prefilter(s, g)
        assert cost_moves(filtered) <= cost_moves(s)
        assert validate(filtered, g, "relaxed").feasible


def test_aba_preserves_strict_feasibility():
    rng = random.Random(33)
    for _ in range(20):
        s, g, _ = random_rollout_instance(rng, noise=0.4, horizon=16)
        if not validate(s, g, "strict").feasible:
            continue
        filtered = aba_prefilter(s, g)
        assert validate(filtered, g, "strict").feasible
