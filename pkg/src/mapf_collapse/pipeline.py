"""End-to-end optimization: filter, enumerate, constrain, solve, apply.

optimize_schedule validates the input in the requested mode, optionally
runs the ABA prefilter, generates candidates, builds relations and the
0/1 model, solves, applies the selection, and re-validates. Reported
cost/SoC deltas always compare the original input against the final
output, so the prefilter's removals are part of the saving.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from .candidates import (
    ABA_DEFAULT_MAX_PASSES,
    REDUCED,
    GENERATION_MODES,
    CandidateSet,
    aba_prefilter_detailed,
    generate_candidates,
)
from .errors import InfeasibleInputError
from .graph import Graph, GridMap
from .ilp import (
    CollapseSolution,
    IlpModel,
    apply_solution,
    build_model,
    solve_exact,
)
from .relations import RelationSet, build_relations
from .schedule import STRICT, Schedule, cost_moves, isr, soc, validate

DEFAULT_TIME_LIMIT_MS = 5000


@dataclass(frozen=True)
class OptimizeConfig:
    mode: str = STRICT
    aba_filter: bool = True
    candidates: str = REDUCED
    time_limit_ms: int = DEFAULT_TIME_LIMIT_MS
    aba_max_passes: int = ABA_DEFAULT_MAX_PASSES
    solver: object = None  # callable (model, time_limit_s) -> CollapseSolution

    def __post_init__(self):
        if self.candidates not in GENERATION_MODES:
            raise ValueError(f"candidates must be one of {GENERATION_MODES}")

    def solver_fn(self):
        return self.solver if self.solver is not None else solve_exact

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "aba_filter": self.aba_filter,
            "candidates": self.candidates,
            "time_limit_ms": self.time_limit_ms,
            "aba_max_passes": self.aba_max_passes,
        }


@dataclass(frozen=True)
class OptimizeResult:
    schedule: Schedule
    solution: CollapseSolution
    model: IlpModel
    relations: RelationSet
    candidates: CandidateSet
    stats: dict = field(compare=False)


def optimize_schedule(
    schedule: Schedule,
    graph: Graph,
    config: OptimizeConfig = OptimizeConfig(),
    grid: GridMap | None = None,
) -> OptimizeResult:
    """Run the whole collapse pipeline on a feasible schedule.

    Raises InfeasibleInputError when the input fails validation in the
    configured mode, and ConsistencyError if the applied selection were
    ever to break feasibility (a bug, not an input problem).
    """
    del grid  # density metrics are computed by the bench layer
    t_start = time.monotonic()
    report = validate(schedule, graph, config.mode)
    if not report.feasible:
        raise InfeasibleInputError(report)

    cost_before = cost_moves(schedule)
    soc_before = soc(schedule)
    isr_before = isr(schedule)

    working = schedule
    aba_passes = 0
    if config.aba_filter:
        working, aba_passes = aba_prefilter_detailed(
            schedule, graph, config.aba_max_passes
        )
    aba_removed = cost_before - cost_moves(working)

    t_build = time.monotonic()
    cands = generate_candidates(working, config.candidates)
    rel = build_relations(working, cands)
    model = build_model(rel, cands)
    build_time = time.monotonic() - t_build

    solution = config.solver_fn()(model, config.time_limit_ms / 1000.0)
    solution = replace(solution, build_time=build_time)
    final = apply_solution(working, cands, solution, graph, config.mode)

    cost_after = cost_moves(final)
    total_time = time.monotonic() - t_start
    stats = {
        "config": config.to_json_dict(),
        "n_agents": schedule.n_agents,
        "horizon": schedule.horizon,
        "cost_before": cost_before,
        "cost_after": cost_after,
        "saving": cost_before - cost_after,
        "saving_ratio": (cost_before - cost_after) / cost_before if cost_before else 0.0,
        "soc_before": soc_before,
        "soc_after": soc(final),
        "isr_before": isr_before,
        "isr_after": isr(final),
        "aba_passes": aba_passes,
        "aba_removed_moves": aba_removed,
        "ilp_saving": solution.saving,
        "n_actions": len(cands.actions),
        "n_mutex": len(model.mutex),
        "n_implications": len(model.implications),
        "n_invalid": len(model.fixed_zero),
        "optimal": solution.optimal,
        "nodes_explored": solution.nodes_explored,
        "build_time_ms": solution.build_time * 1000.0,
        "solve_time_ms": solution.solve_time * 1000.0,
        "total_time_ms": total_time * 1000.0,
    }
    return OptimizeResult(final, solution, model, rel, cands, stats)


TIMING_KEYS = ("build_time_ms", "solve_time_ms", "total_time_ms")


def strip_timing(stats: dict) -> dict:
    """Copy of a stats dict without wall-clock fields (for comparisons)."""
    return {k: v for k, v in stats.items() if k not in TIMING_KEYS}
