"""0/1 model over collapse candidates and an exact anytime solver.

The model maximizes total saving subject to pairwise mutexes (at most
one of two conflicting collapses) and covering implications (a selected
collapse needs, per blocking agent and timestep, at least one suitable
collapse selected on that agent). Selecting nothing is always feasible.

solve_exact is a depth-first branch-and-bound: variables in weight-
descending order, y=1 branch first, mutex and implication propagation,
warm start from solve_greedy. The admissible bound is the sum of
undecided weights, tightened per mutex clique (a greedy static clique
cover; each clique contributes at most its best undecided weight).
The solver interface is a plain callable (model, time_limit_s) ->
CollapseSolution so an external backend can be swapped in.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass

from .candidates import CandidateSet, collapse_paths
from .errors import ConsistencyError
from .graph import Graph
from .relations import RelationSet
from .schedule import Schedule, cost_moves, validate


@dataclass(frozen=True)
class IlpModel:
    weights: tuple[int, ...]
    mutex: tuple[tuple[int, int], ...]
    implications: tuple[tuple[int, tuple[int, ...]], ...]
    fixed_zero: frozenset[int]

    @property
    def n_vars(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class CollapseSolution:
    selected: frozenset[int]
    saving: int
    optimal: bool
    nodes_explored: int = 0
    build_time: float = 0.0
    solve_time: float = 0.0


def build_model(relations: RelationSet, candidates: CandidateSet) -> IlpModel:
    """One binary variable per candidate, constraints from the relations.

    Invalid actions are fixed to zero and carry no constraints. Zero-
    weight candidates (possible in exhaustive mode) are fixed to zero as
    well: collapsing an already-constant segment changes no position, so
    it can neither save cost nor serve as a suitable action.
    """
    weights = tuple(c.weight for c in candidates.actions)
    fixed = set(relations.invalid)
    fixed.update(i for i, w in enumerate(weights) if w == 0)
    mutex = sorted(
        {
            pair
            for pair in (relations.exclusions_in + relations.exclusions_cross)
            if pair[0] not in fixed and pair[1] not in fixed
        }
    )
    implications = tuple(
        (d.action, d.suitable)
        for d in relations.dependencies
        if d.action not in fixed
    )
    return IlpModel(weights, tuple(mutex), implications, frozenset(fixed))


def solve_greedy(model: IlpModel) -> CollapseSolution:
    """Weight-descending greedy with implication closure.

    Each action is tentatively added together with the actions needed to
    satisfy its implications (picking the heaviest compatible suitable
    action, recursively); the whole group is rolled back when a mutex or
    an unsatisfiable implication is hit.
    """
    t0 = time.monotonic()
    n = model.n_vars
    order = sorted(
        (i for i in range(n) if i not in model.fixed_zero),
        key=lambda i: (-model.weights[i], i),
    )
    mutex_adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in model.mutex:
        mutex_adj[a].add(b)
        mutex_adj[b].add(a)
    imps_of: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for owner, suitable in model.implications:
        imps_of[owner].append(suitable)

    selected: set[int] = set()

    def blocked(v: int, group: set[int]) -> bool:
        return any(u in selected or u in group for u in mutex_adj[v])

    def close(seed: int) -> set[int] | None:
        group = {seed}
        queue = [seed]
        while queue:
            cur = queue.pop(0)
            if any(u in selected or (u in group and u != cur) for u in mutex_adj[cur]):
                return None
            for suitable in imps_of[cur]:
                if any(s in selected or s in group for s in suitable):
                    continue
                pick = None
                for s in sorted(suitable, key=lambda i: (-model.weights[i], i)):
                    if s in model.fixed_zero:
                        continue
                    if blocked(s, group):
                        continue
                    pick = s
                    break
                if pick is None:
                    return None
                group.add(pick)
                queue.append(pick)
        return group

    for i in order:
        if i in selected:
            continue
        if mutex_adj[i] & selected:
            continue
        group = close(i)
        if group is not None:
            selected |= group

    saving = sum(model.weights[i] for i in selected)
    upper = sum(model.weights[i] for i in range(n) if i not in model.fixed_zero)
    return CollapseSolution(
        frozenset(selected),
        saving,
        optimal=saving == upper,
        nodes_explored=0,
        solve_time=time.monotonic() - t0,
    )


class _TimeUp(Exception):
    pass


def _presolve_dominated(model: IlpModel, free: list[int]) -> set[int]:
    """Fix variables that a mutex partner renders pointless.

    i can be fixed to zero when some free partner j has w_j >= w_i,
    conflicts with nothing i does not conflict with, owns no implication
    i does not own, and can serve as a suitable action anywhere i can:
    swapping i for j in any feasible selection stays feasible and never
    loses saving. Run-endpoint candidates over a long constant run
    produce exactly such interchangeable variables; without this step
    the search re-proves the same subtree once per duplicate.
    """
    free_set = set(free)
    madj: dict[int, set[int]] = {v: set() for v in free}
    for a, b in model.mutex:
        if a in free_set and b in free_set:
            madj[a].add(b)
            madj[b].add(a)
    owner_sets: dict[int, set[frozenset[int]]] = {v: set() for v in free}
    member_sets: dict[int, set[int]] = {v: set() for v in free}
    for imp_id, (owner, suitable) in enumerate(model.implications):
        if owner in free_set:
            owner_sets[owner].add(frozenset(suitable))
        for s in suitable:
            if s in free_set:
                member_sets[s].add(imp_id)

    fixed: set[int] = set()

    def dominates(j: int, i: int) -> bool:
        if model.weights[j] < model.weights[i]:
            return False
        if len(madj[j]) - (i in madj[j]) > len(madj[i]):
            return False
        if len(owner_sets[j]) > len(owner_sets[i]) or len(member_sets[i]) > len(member_sets[j]):
            return False
        if not (madj[j] - {i}) <= madj[i]:
            return False
        if not owner_sets[j] <= owner_sets[i]:
            return False
        return member_sets[i] <= member_sets[j]

    pairs = sorted((a, b) for a, partners in madj.items() for b in partners if a < b)
    for a, b in pairs:
        if a in fixed or b in fixed:
            continue
        if dominates(a, b):
            fixed.add(b)
        elif dominates(b, a):
            fixed.add(a)
    return fixed


def _clique_cover(free: list[int], mutex_adj: list[list[int]]) -> tuple[list[list[int]], dict[int, int]]:
    """Greedy partition of free variables into mutex cliques.

    Each clique admits at most one selected action, so during search it
    contributes at most its best undecided weight to the bound. A
    variable joins the lowest-index clique all of whose members are
    mutex partners, found by counting partner occurrences per clique
    (linear in the mutex degree instead of quadratic in clique count).
    """
    free_set = set(free)
    cliques: list[list[int]] = []
    clique_of: dict[int, int] = {}
    for v in free:
        counts: dict[int, int] = {}
        for u in mutex_adj[v]:
            if u in free_set and u in clique_of:
                ci = clique_of[u]
                counts[ci] = counts.get(ci, 0) + 1
        chosen = -1
        for ci in sorted(counts):
            if counts[ci] == len(cliques[ci]):
                chosen = ci
                break
        if chosen < 0:
            chosen = len(cliques)
            cliques.append([])
        cliques[chosen].append(v)
        clique_of[v] = chosen
    return cliques, clique_of


def solve_exact(model: IlpModel, time_limit: float | None = 5.0) -> CollapseSolution:
    """Exact branch-and-bound; anytime under a time limit.

    Returns the best selection found; optimal is True iff the search
    completed within the limit. Deterministic: fixed variable order and
    first-found tie-breaking.
    """
    t0 = time.monotonic()
    deadline = None if time_limit is None else t0 + time_limit
    greedy = solve_greedy(model)
    n = model.n_vars
    free = sorted(
        (i for i in range(n) if i not in model.fixed_zero),
        key=lambda i: (-model.weights[i], i),
    )
    if not free:
        return CollapseSolution(frozenset(), 0, True, 1, solve_time=time.monotonic() - t0)

    dominated = _presolve_dominated(model, free)
    dead = set(model.fixed_zero) | dominated
    free = [v for v in free if v not in dominated]

    weights = model.weights
    mutex_adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in model.mutex:
        mutex_adj[a].append(b)
        mutex_adj[b].append(a)
    imp_owner: list[int] = []
    imp_members: list[tuple[int, ...]] = []
    imps_of_owner: list[list[int]] = [[] for _ in range(n)]
    member_imps: list[list[int]] = [[] for _ in range(n)]
    for owner, suitable in model.implications:
        imp_id = len(imp_owner)
        imp_owner.append(owner)
        imp_members.append(suitable)
        imps_of_owner[owner].append(imp_id)
        for s in suitable:
            member_imps[s].append(imp_id)

    # live[imp] = number of members that could still be 1 (undecided or 1)
    live = [0] * len(imp_owner)
    for imp_id, suitable in enumerate(imp_members):
        live[imp_id] = sum(1 for s in suitable if s not in dead)

    raw_cliques, clique_of = _clique_cover(free, mutex_adj)
    cliques = [sorted(c, key=lambda i: (-weights[i], i)) for c in raw_cliques]

    UNDEC, ZERO, ONE = -1, 0, 1
    val = [UNDEC] * n
    for i in dead:
        val[i] = ZERO

    trail: list[int] = []
    state = {"one_weight": 0, "undec_weight": 0, "clique_sum": 0, "nodes": 0}
    state["undec_weight"] = sum(weights[v] for v in free)
    best_saving = greedy.saving
    best_selected = greedy.selected

    # clique_contrib[ci] caches each clique's bound contribution (its best
    # undecided weight, or 0 once a member is selected); cliques whose
    # members changed since the last bound() call sit in dirty_cliques.
    def clique_value(ci: int) -> int:
        best_undec = 0
        for v in cliques[ci]:
            if val[v] == ONE:
                return 0
            if val[v] == UNDEC and best_undec == 0:
                best_undec = weights[v]
        return best_undec

    clique_contrib = [clique_value(ci) for ci in range(len(cliques))]
    state["clique_sum"] = sum(clique_contrib)
    dirty_cliques: set[int] = set()

    def assign(var: int, x: int) -> bool:
        queue = [(var, x)]
        while queue:
            v, want = queue.pop()
            cur = val[v]
            if cur != UNDEC:
                if cur != want:
                    return False
                continue
            val[v] = want
            trail.append(v)
            state["undec_weight"] -= weights[v]
            dirty_cliques.add(clique_of[v])
            if want == ONE:
                state["one_weight"] += weights[v]
                for u in mutex_adj[v]:
                    if val[u] == ONE:
                        return False
                    if val[u] == UNDEC:
                        queue.append((u, ZERO))
                for imp_id in imps_of_owner[v]:
                    if live[imp_id] == 0:
                        return False
            else:
                for imp_id in member_imps[v]:
                    live[imp_id] -= 1
                conflict = False
                for imp_id in member_imps[v]:
                    if live[imp_id] == 0:
                        owner = imp_owner[imp_id]
                        if val[owner] == ONE:
                            conflict = True
                        elif val[owner] == UNDEC:
                            queue.append((owner, ZERO))
                if conflict:
                    return False
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            v = trail.pop()
            if val[v] == ONE:
                state["one_weight"] -= weights[v]
            else:
                for imp_id in member_imps[v]:
                    live[imp_id] += 1
            val[v] = UNDEC
            state["undec_weight"] += weights[v]
            dirty_cliques.add(clique_of[v])

    def bound() -> int:
        if dirty_cliques:
            delta = 0
            for ci in dirty_cliques:
                fresh = clique_value(ci)
                delta += fresh - clique_contrib[ci]
                clique_contrib[ci] = fresh
            state["clique_sum"] += delta
            dirty_cliques.clear()
        return state["one_weight"] + state["clique_sum"]

    def dfs(ptr: int) -> None:
        nonlocal best_saving, best_selected
        state["nodes"] += 1
        if deadline is not None and state["nodes"] % 128 == 0 and time.monotonic() > deadline:
            raise _TimeUp
        # additive bound is free and dominates the clique bound
        if state["one_weight"] + state["undec_weight"] > best_saving:
            if bound() <= best_saving:
                return
        else:
            return
        while ptr < len(free) and val[free[ptr]] != UNDEC:
            ptr += 1
        if ptr == len(free):
            saving = state["one_weight"]
            if saving > best_saving:
                best_saving = saving
                best_selected = frozenset(v for v in free if val[v] == ONE)
            return
        v = free[ptr]
        mark = len(trail)
        if assign(v, ONE):
            dfs(ptr + 1)
        undo(mark)
        if assign(v, ZERO):
            dfs(ptr + 1)
        undo(mark)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 2 * len(free) + 1000))
    completed = True
    try:
        dfs(0)
    except _TimeUp:
        completed = False
    finally:
        sys.setrecursionlimit(old_limit)

    return CollapseSolution(
        best_selected,
        best_saving,
        optimal=completed,
        nodes_explored=state["nodes"],
        solve_time=time.monotonic() - t0,
    )


def apply_solution(
    schedule: Schedule,
    candidates: CandidateSet,
    solution: CollapseSolution,
    graph: Graph,
    mode: str = "strict",
) -> Schedule:
    """Apply the selected collapses and re-validate the result.

    A validation failure or a saving mismatch here means the relation
    builder or solver violated its contract, so it raises instead of
    returning a bad schedule.
    """
    chosen = [candidates.actions[i] for i in sorted(solution.selected)]
    result = collapse_paths(schedule, chosen)
    report = validate(result, graph, mode)
    if not report.feasible:
        raise ConsistencyError(
            f"applied solution is infeasible, first violation: {report.violations[0]}"
        )
    removed = cost_moves(schedule) - cost_moves(result)
    if removed != solution.saving:
        raise ConsistencyError(
            f"saving accounting mismatch: schedule lost {removed} moves, solver claimed {solution.saving}"
        )
    return result
