"""Schedule generators: a prioritized planner and a noisy rollout.

prioritized_plan produces clean strict-mode schedules via space-time
search against a reservation table. noisy_rollout emulates the jittery,
oscillation-heavy schedules that next-action policies tend to produce:
each agent greedily follows a shortest route but takes a uniformly
random feasible step with probability p. Rollouts are bit-reproducible
for a fixed seed (Mersenne Twister via random.Random, fixed agent and
timestep ordering).
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass

from .errors import PlanningError
from .graph import Graph, GridMap
from .schedule import AgentRecord, Schedule

RNG_NAME = "mt19937"


@dataclass(frozen=True)
class PlanRequest:
    graph: Graph
    starts: tuple[str, ...]
    goals: tuple[str, ...]
    horizon: int
    seed: int = 0
    noise: float = 0.0
    names: tuple[str, ...] = ()
    grid: GridMap | None = None

    def __post_init__(self):
        if len(self.starts) != len(self.goals):
            raise ValueError("starts and goals must have equal length")
        if not self.starts:
            raise ValueError("at least one agent is required")
        if len(set(self.starts)) != len(self.starts):
            raise ValueError("starts must be pairwise distinct")
        if len(set(self.goals)) != len(self.goals):
            raise ValueError("goals must be pairwise distinct")
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must be in [0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        for v in list(self.starts) + list(self.goals):
            self.graph.require(v)
        if self.names and len(self.names) != len(self.starts):
            raise ValueError("names must match the number of agents")

    def agent_names(self) -> tuple[str, ...]:
        if self.names:
            return self.names
        return tuple(f"a{i}" for i in range(len(self.starts)))


def prioritized_plan(request: PlanRequest) -> Schedule:
    """Plan agents one by one with a space-time reservation table.

    Earlier agents' paths are reserved (vertices, edge transitions, and
    their goal forever after arrival). Raises PlanningError when an
    agent has no conflict-free route within the horizon cap.
    """
    g = request.graph
    names = request.agent_names()
    reserved_vertex: set[tuple[str, int]] = set()
    reserved_edge: set[tuple[int, str, str]] = set()
    parked: list[tuple[str, int]] = []  # (vertex, resting from timestep)
    max_reserved_t = 0
    paths: list[list[str]] = []

    def blocked(v: str, t: int) -> bool:
        if (v, t) in reserved_vertex:
            return True
        return any(pv == v and t >= pt for pv, pt in parked)

    for i, (start, goal) in enumerate(zip(request.starts, request.goals)):
        dist = g.bfs_distances(goal)
        if start not in dist:
            raise PlanningError(names[i], f"goal {goal!r} unreachable from start {start!r}")

        def goal_free_from(t: int) -> bool:
            if any(pv == goal for pv, _ in parked):
                return False
            return not any((goal, tt) in reserved_vertex for tt in range(t, max_reserved_t + 1))

        # space-time search; unit costs mean g == t, so (v, t) is closed on
        # first generation. Ties prefer smaller h (push toward the goal).
        startstate = (start, 0)
        visited = {startstate}
        parent: dict[tuple[str, int], tuple[str, int] | None] = {startstate: None}
        heap: list[tuple[int, int, str, int]] = [(dist[start], dist[start], start, 0)]
        found = None
        while heap:
            f, h, v, t = heapq.heappop(heap)
            if v == goal and goal_free_from(t):
                found = (v, t)
                break
            if t >= request.horizon:
                continue
            for w in [v] + g.neighbors(v):
                nt = t + 1
                if w not in dist:
                    continue
                if blocked(w, nt):
                    continue
                if (nt - 1, w, v) in reserved_edge:
                    continue
                state = (w, nt)
                if state in visited:
                    continue
                visited.add(state)
                parent[state] = (v, t)
                heapq.heappush(heap, (nt + dist[w], dist[w], w, nt))
        if found is None:
            raise PlanningError(names[i], "no conflict-free path within the horizon cap")

        path = []
        cur: tuple[str, int] | None = found
        while cur is not None:
            path.append(cur[0])
            cur = parent[cur]
        path.reverse()
        arrival = len(path) - 1
        for t, v in enumerate(path):
            reserved_vertex.add((v, t))
            if t > 0:
                reserved_edge.add((t - 1, path[t - 1], v))
        parked.append((goal, arrival))
        max_reserved_t = max(max_reserved_t, arrival)
        paths.append(path)

    horizon = max(len(p) - 1 for p in paths)
    agents = []
    for i, path in enumerate(paths):
        padded = path + [request.goals[i]] * (horizon - (len(path) - 1))
        agents.append(AgentRecord(names[i], request.starts[i], request.goals[i], tuple(padded)))
    return Schedule(tuple(agents), horizon)


def noisy_rollout(request: PlanRequest) -> Schedule:
    """Step agents toward their goals with probability 1-p of greediness.

    Per timestep, agents move in index order under a shared reservation:
    no two agents may claim the same next vertex, nobody may enter the
    current cell of an agent that has not moved yet, and swaps are
    rejected. Any blocked choice falls back to waiting, which is always
    safe under these rules, so the result always validates in relaxed
    mode. Stops early once every agent rests on its goal.
    """
    g = request.graph
    rng = random.Random(request.seed)
    names = request.agent_names()
    n = len(request.starts)
    dists = [g.bfs_distances(goal) for goal in request.goals]
    paths: list[list[str]] = [[s] for s in request.starts]
    current = list(request.starts)

    for _ in range(request.horizon):
        decided_next: set[str] = set()
        decided_moves: set[tuple[str, str]] = set()
        undecided_cells = set(current)
        next_positions: list[str] = []
        for i in range(n):
            here = current[i]
            undecided_cells.discard(here)
            options = [here] + g.neighbors(here)

            def feasible(w: str) -> bool:
                if w in decided_next or w in undecided_cells:
                    return False
                if w != here and (w, here) in decided_moves:
                    return False  # someone already decided the reverse traversal
                return True

            if rng.random() < request.noise:
                pool = [w for w in options if feasible(w)]
                choice = pool[rng.randrange(len(pool))] if pool else here
            else:
                d = dists[i]
                if here not in d:
                    choice = here  # goal unreachable, hold position
                else:
                    ranked = sorted(options, key=lambda w: (d.get(w, len(g) + 1), w))
                    choice = ranked[0]
                    if not feasible(choice):
                        choice = here
            decided_next.add(choice)
            if choice != here:
                decided_moves.add((here, choice))
            next_positions.append(choice)
        current = next_positions
        for i in range(n):
            paths[i].append(current[i])
        if all(current[i] == request.goals[i] for i in range(n)):
            break

    horizon = len(paths[0]) - 1
    agents = tuple(
        AgentRecord(names[i], request.starts[i], request.goals[i], tuple(paths[i]))
        for i in range(n)
    )
    return Schedule(agents, horizon)
