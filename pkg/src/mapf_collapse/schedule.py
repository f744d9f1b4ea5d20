"""Schedule model, feasibility validation, and cost/quality metrics.

A schedule is an N x (T+1) matrix of vertex ids: one row per agent,
one column per timestep. The validator reports every violation instead
of stopping at the first, so a report doubles as a diagnosis. All
functions here are pure; schedules are immutable values.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import InstanceFormatError, UnsupportedScheduleError
from .graph import Graph, GridMap, derive_grid, grid_to_graph, load_map, parse_cell

STRICT = "strict"
RELAXED = "relaxed"
MODES = (STRICT, RELAXED)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class AgentRecord:
    name: str
    start: str
    goal: str
    path: tuple[str, ...]


@dataclass(frozen=True)
class Schedule:
    agents: tuple[AgentRecord, ...]
    horizon: int

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        for ag in self.agents:
            if len(ag.path) != self.horizon + 1:
                raise ValueError(
                    f"agent {ag.name!r} path has {len(ag.path)} positions, expected {self.horizon + 1}"
                )

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    def with_paths(self, paths: list[list[str]]) -> "Schedule":
        """Copy with replaced paths (same agents, starts, goals)."""
        agents = tuple(
            AgentRecord(ag.name, ag.start, ag.goal, tuple(p))
            for ag, p in zip(self.agents, paths)
        )
        return Schedule(agents, self.horizon)


@dataclass(frozen=True)
class Violation:
    kind: str
    agents: tuple[int, ...]
    timestep: int

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "agents": list(self.agents), "timestep": self.timestep}


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[Violation, ...]

    def to_json_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "violations": [v.to_json_dict() for v in self.violations],
        }


def validate(schedule: Schedule, graph: Graph, mode: str = STRICT) -> FeasibilityReport:
    """Check a schedule against the graph and the collision rules.

    Strict mode checks everything; relaxed mode skips the goal-stop and
    duplicate-goal checks so partially solved schedules can be handled.
    Unknown vertices raise; they are an input error, not a violation.
    """
    _check_mode(mode)
    T = schedule.horizon
    for ag in schedule.agents:
        graph.require(ag.start)
        graph.require(ag.goal)
        for v in ag.path:
            graph.require(v)

    violations: list[Violation] = []
    for i, ag in enumerate(schedule.agents):
        if ag.path[0] != ag.start:
            violations.append(Violation("start-mismatch", (i,), 0))
        if mode == STRICT and ag.path[T] != ag.goal:
            violations.append(Violation("goal-stop", (i,), T))
        for t in range(T):
            if not graph.has_edge(ag.path[t], ag.path[t + 1]):
                violations.append(Violation("disconnected-step", (i,), t))

    for t in range(T + 1):
        occupant: dict[str, int] = {}
        for i, ag in enumerate(schedule.agents):
            v = ag.path[t]
            if v in occupant:
                violations.append(Violation("vertex-collision", (occupant[v], i), t))
            else:
                occupant[v] = i

    for t in range(T):
        movers: dict[tuple[str, str], int] = {}
        for i, ag in enumerate(schedule.agents):
            u, v = ag.path[t], ag.path[t + 1]
            if u == v:
                continue
            if (v, u) in movers:
                violations.append(Violation("edge-collision", (movers[(v, u)], i), t))
            movers[(u, v)] = i

    seen_starts: dict[str, int] = {}
    seen_goals: dict[str, int] = {}
    for i, ag in enumerate(schedule.agents):
        if ag.start in seen_starts:
            violations.append(Violation("duplicate-start", (seen_starts[ag.start], i), 0))
        else:
            seen_starts[ag.start] = i
        if mode == STRICT:
            if ag.goal in seen_goals:
                violations.append(Violation("duplicate-goal", (seen_goals[ag.goal], i), T))
            else:
                seen_goals[ag.goal] = i

    violations.sort(key=lambda v: (v.timestep, v.kind, v.agents))
    return FeasibilityReport(not violations, tuple(violations))


def cost_moves(schedule: Schedule) -> int:
    """Number of (agent, timestep) pairs that traverse an edge."""
    total = 0
    for ag in schedule.agents:
        p = ag.path
        total += sum(1 for t in range(len(p) - 1) if p[t] != p[t + 1])
    return total


def settle_time(path: tuple[str, ...], goal: str) -> int:
    """Smallest t with path[k] == goal for all k >= t; T if never settled."""
    T = len(path) - 1
    if path[T] != goal:
        return T
    t = T
    while t > 0 and path[t - 1] == goal:
        t -= 1
    return t


def soc(schedule: Schedule) -> int:
    """Sum over agents of their settle times (flowtime)."""
    return sum(settle_time(ag.path, ag.goal) for ag in schedule.agents)


def isr(schedule: Schedule) -> float:
    """Fraction of agents that end resting at their goal."""
    if not schedule.agents:
        return 1.0
    T = schedule.horizon
    done = sum(1 for ag in schedule.agents if ag.path[T] == ag.goal)
    return done / len(schedule.agents)


def agent_density(schedule: Schedule, grid: GridMap, fov: int = 11) -> float:
    """Time-averaged fraction of free field-of-view cells that hold agents.

    For every (agent, timestep) pair, count the agents inside the
    fov x fov window centered on the agent (the agent itself included,
    window clipped at the map borders) and divide by the number of free
    cells inside the clipped window. Returns the mean over all pairs.
    """
    if fov < 1 or fov % 2 == 0:
        raise ValueError(f"fov must be odd and positive, got {fov}")
    if not schedule.agents:
        return 0.0
    half = fov // 2
    cells: list[list[tuple[int, int]]] = []
    for ag in schedule.agents:
        row = []
        for v in ag.path:
            rc = parse_cell(v)
            if rc is None:
                raise UnsupportedScheduleError(f"vertex {v!r} is not a grid cell")
            row.append(rc)
        cells.append(row)

    # 2-D prefix sums over free cells for O(1) window denominators.
    H, W = grid.height, grid.width
    pref = [[0] * (W + 1) for _ in range(H + 1)]
    for r in range(H):
        row_pref = pref[r + 1]
        prev = pref[r]
        for c in range(W):
            row_pref[c + 1] = (
                row_pref[c] + prev[c + 1] - prev[c] + (1 if grid.is_free(r, c) else 0)
            )

    def free_in(r0: int, r1: int, c0: int, c1: int) -> int:
        return pref[r1 + 1][c1 + 1] - pref[r0][c1 + 1] - pref[r1 + 1][c0] + pref[r0][c0]

    total = 0.0
    count = 0
    T = schedule.horizon
    for t in range(T + 1):
        positions = [cells[i][t] for i in range(len(cells))]
        for r, c in positions:
            r0, r1 = max(0, r - half), min(H - 1, r + half)
            c0, c1 = max(0, c - half), min(W - 1, c + half)
            inside = sum(1 for (ar, ac) in positions if r0 <= ar <= r1 and c0 <= ac <= c1)
            denom = free_in(r0, r1, c0, c1)
            total += inside / denom
            count += 1
    return total / count


@dataclass(frozen=True)
class CostMetrics:
    moves: int
    soc: int
    isr: float
    agent_density: float | None


def compute_metrics(schedule: Schedule, grid: GridMap | None = None, fov: int = 11) -> CostMetrics:
    density = None
    if grid is not None:
        try:
            density = agent_density(schedule, grid, fov)
        except UnsupportedScheduleError:
            density = None
    return CostMetrics(cost_moves(schedule), soc(schedule), isr(schedule), density)


@dataclass(frozen=True)
class Instance:
    """A schedule together with the graph (and grid, when known) it lives on."""

    graph: Graph
    schedule: Schedule
    grid: GridMap | None = None
    map_name: str = "graph"

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_json_dict(),
            "horizon": self.schedule.horizon,
            "agents": [
                {
                    "name": ag.name,
                    "start": ag.start,
                    "goal": ag.goal,
                    "path": list(ag.path),
                }
                for ag in self.schedule.agents
            ],
        }


def instance_from_json_dict(data: dict, base_dir: str = ".") -> Instance:
    """Build an Instance from parsed instance JSON.

    The graph is either embedded graph JSON or {"map_file": path} with
    the path resolved relative to base_dir.
    """
    if not isinstance(data, dict):
        raise InstanceFormatError("instance JSON must be an object")
    for key in ("graph", "horizon", "agents"):
        if key not in data:
            raise InstanceFormatError(f"instance JSON missing {key!r}")
    gspec = data["graph"]
    grid = None
    map_name = "graph"
    if isinstance(gspec, dict) and "map_file" in gspec:
        path = os.path.join(base_dir, gspec["map_file"])
        try:
            with open(path, "r", encoding="utf-8") as fh:
                grid = load_map(fh.read())
        except OSError as exc:
            raise InstanceFormatError(f"cannot read map file {path!r}: {exc}") from exc
        graph = grid_to_graph(grid)
        map_name = os.path.splitext(os.path.basename(gspec["map_file"]))[0]
    else:
        try:
            graph = Graph.from_json_dict(gspec)
        except (ValueError, KeyError, TypeError) as exc:
            raise InstanceFormatError(f"bad graph JSON: {exc}") from exc
        grid = derive_grid(graph)

    horizon = data["horizon"]
    if not isinstance(horizon, int) or horizon < 0:
        raise InstanceFormatError(f"horizon must be a non-negative integer, got {horizon!r}")
    agents = []
    if not isinstance(data["agents"], list):
        raise InstanceFormatError("'agents' must be a list")
    for idx, entry in enumerate(data["agents"]):
        try:
            path = tuple(entry["path"])
            agents.append(AgentRecord(str(entry["name"]), entry["start"], entry["goal"], path))
        except (KeyError, TypeError) as exc:
            raise InstanceFormatError(f"agent #{idx} malformed: {exc}") from exc
        if len(path) != horizon + 1:
            raise InstanceFormatError(
                f"agent #{idx} path length {len(path)} does not match horizon {horizon}"
            )
    try:
        schedule = Schedule(tuple(agents), horizon)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc
    return Instance(graph, schedule, grid, map_name)


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: invalid JSON: {exc}") from exc
    return instance_from_json_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


def save_instance(instance: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
