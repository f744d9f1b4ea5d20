"""Shared fixtures and generators for the test suite."""

from __future__ import annotations

import random

from mapf_collapse import (
    AgentRecord,
    Graph,
    GridMap,
    PlanRequest,
    Schedule,
    grid_to_graph,
    noisy_rollout,
)
from mapf_collapse.candidates import EXHAUSTIVE, generate_candidates


def schedule_from_paths(paths, starts=None, goals=None, names=None):
    """Schedule with start = path[0] and goal = path[-1] unless overridden."""
    horizon = len(paths[0]) - 1
    agents = []
    for i, path in enumerate(paths):
        start = starts[i] if starts else path[0]
        goal = goals[i] if goals else path[-1]
        name = names[i] if names else f"a{i}"
        agents.append(AgentRecord(name, start, goal, tuple(path)))
    return Schedule(tuple(agents), horizon)


def line_graph(n, prefix="v"):
    vs = [f"{prefix}{i}" for i in range(n)]
    return Graph(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])


def complete_graph(names):
    names = list(names)
    edges = [(names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))]
    return Graph(names, edges)


def open_grid(height, width):
    return GridMap(height, width, frozenset())


def single_edge_graph():
    return Graph(["u1", "u2"], [("u1", "u2")])


def triangle_graph():
    return Graph(["u1", "u2", "u3"], [("u1", "u2"), ("u2", "u3"), ("u1", "u3")])


def square_graph():
    vs = ["u1", "u2", "u3", "u4"]
    return Graph(vs, [("u1", "u2"), ("u2", "u3"), ("u3", "u4"), ("u4", "u1")])


def random_rollout_instance(
    rng: random.Random,
    height=3,
    width=3,
    n_agents=3,
    horizon=8,
    noise=0.5,
    blocked_cells=0,
):
    """A relaxed-feasible schedule from a seeded rollout on a small grid."""
    while True:
        blocked = set()
        cells = [(r, c) for r in range(height) for c in range(width)]
        if blocked_cells:
            blocked = set(rng.sample(cells, blocked_cells))
        grid = GridMap(height, width, frozenset(blocked))
        free = [f"r{r}c{c}" for r, c in grid.free_cells()]
        if len(free) < 2 * n_agents:
            continue
        graph = grid_to_graph(grid)
        starts = tuple(rng.sample(free, n_agents))
        goals = tuple(rng.sample(free, n_agents))
        request = PlanRequest(
            graph,
            starts,
            goals,
            horizon=horizon,
            seed=rng.randrange(1 << 30),
            noise=noise,
            grid=grid,
        )
        return noisy_rollout(request), graph, grid


def positive_exhaustive_count(schedule) -> int:
    cands = generate_candidates(schedule, EXHAUSTIVE)
    return sum(1 for c in cands.actions if c.weight > 0)
