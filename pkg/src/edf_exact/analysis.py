"""Exact global-EDF schedulability analysis.

The test simulates the all-WCET global-EDF schedule from time 0 and samples
the configuration (per-task execution since the latest release) at the
hyperperiod-aligned instants ``O_max + k*P``. Two equal consecutive samples
mean the schedule has become periodic; such a match is guaranteed no later
than ``t_up = O_max + (C_tau + 1) * P`` for a valid schedule. A deadline miss
before that point means the system is not schedulable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate
from typing import Any, Iterable, Union

from .engine import WCET, EngineState, ExecutionModel, Miss, Policy, ScheduleTrace, simulate
from .model import JobId, TaskSystem, last_release, t_up


class UndefinedConfigurationError(ValueError):
    """Configurations only exist from O_max on."""


class BoundViolation(AssertionError):
    """The schedule ran to t_up without a deadline miss but did not repeat."""


@dataclass(frozen=True)
class Configuration:
    values: tuple[int, ...]
    sampled_at: int

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Schedulable:
    # None when no steady phase is claimed (runs under reduced execution times).
    steady_k: int | None
    periodic_from: int | None
    configurations: tuple[Configuration, ...] = ()

    @property
    def schedulable(self) -> bool:
        return True


@dataclass(frozen=True)
class DeadlineMiss:
    job: JobId
    at: int
    configurations: tuple[Configuration, ...] = ()

    @property
    def schedulable(self) -> bool:
        return False


Verdict = Union[Schedulable, DeadlineMiss]


@dataclass(frozen=True)
class Accept:
    pass


@dataclass(frozen=True)
class RejectByMiss:
    job: JobId
    at: int


@dataclass(frozen=True)
class RejectByConfigMismatch:
    at_1: int
    at_2: int
    config_1: Configuration
    config_2: Configuration

    @property
    def diff(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.config_1.values, self.config_2.values))


LeungVerdict = Union[Accept, RejectByMiss, RejectByConfigMismatch]


def config_dominates(a: Configuration, b: Configuration) -> bool:
    """``a`` is at least ``b`` in every component."""
    if len(a.values) != len(b.values):
        raise ValueError(f"configurations of different length: {len(a)} vs {len(b)}")
    return all(x >= y for x, y in zip(a.values, b.values))


def execution_since_release(trace: ScheduleTrace, system: TaskSystem, task_index: int, t: int) -> int:
    """e_{i,t}: ticks task ``i`` ran in ``[r, t)``, ``r`` its latest release at or before ``t``."""
    latest = last_release(system.tasks[task_index], t)
    if latest is None:
        raise UndefinedConfigurationError(
            f"task {task_index + 1} has no release at or before t={t}"
        )
    if t > trace.horizon:
        raise ValueError(f"t={t} beyond trace horizon {trace.horizon}")
    return trace.task_execution(task_index, latest[1], t)


def configuration_at(trace: ScheduleTrace, system: TaskSystem, t: int) -> Configuration:
    if t < system.o_max:
        raise UndefinedConfigurationError(f"configuration undefined at t={t} < O_max={system.o_max}")
    return Configuration(
        tuple(execution_since_release(trace, system, i, t) for i in range(len(system.tasks))),
        t,
    )


def _run_aligned(
    system: TaskSystem,
    stop_at: int,
    early_exit: bool,
    policy: Policy = Policy.EDF,
    record_events: bool = False,
) -> tuple[Miss | None, list[Configuration], int | None, EngineState]:
    """Simulate to ``stop_at`` sampling aligned configurations.

    Returns (first miss, samples, steady_k, final state); with ``early_exit``
    the run stops at the first repeated sample.
    """
    P = system.hyperperiod
    state = EngineState(system, policy, WCET, record_events=record_events)
    samples: list[Configuration] = []
    steady_k = None
    next_sample = system.o_max
    while True:
        missed = state.check_deadlines()
        if missed:
            return missed[0], samples, steady_k, state
        if state.t == next_sample:
            state.release_jobs()
            samples.append(Configuration(state.configuration(), state.t))
            next_sample += P
            if steady_k is None and len(samples) > 1 and samples[-1].values == samples[-2].values:
                steady_k = len(samples) - 1
                if early_exit:
                    return None, samples, steady_k, state
            if state.t >= stop_at:
                return None, samples, steady_k, state
        else:
            if state.t >= stop_at:
                return None, samples, steady_k, state
            state.release_jobs()
        state.dispatch()


def simulate_to_steady(
    system: TaskSystem, policy: Policy = Policy.EDF
) -> tuple[ScheduleTrace, Miss | None, int | None]:
    """Simulate until the first repeated aligned configuration, a miss, or t_up."""
    miss, _, steady_k, state = _run_aligned(system, t_up(system), True, policy, record_events=True)
    return state.trace(), miss, steady_k


def exact_test(system: TaskSystem, early_exit: bool = True) -> Verdict:
    """Decide global-EDF schedulability of ``system``.

    With ``early_exit`` the run stops at the first k >= 1 with
    C(O_max + (k-1)P) == C(O_max + kP). Otherwise the whole ``[0, t_up)`` is
    simulated and C(t_up - P) == C(t_up) is required; ``steady_k`` is still
    the first match seen.
    """
    horizon = t_up(system)
    miss, samples, steady_k, _ = _run_aligned(system, horizon, early_exit)
    if miss is not None:
        return DeadlineMiss(miss.job, miss.at, tuple(samples))
    if not early_exit and samples[-1].values != samples[-2].values:
        raise BoundViolation(
            f"C(t_up - P) = {samples[-2].values} != C(t_up) = {samples[-1].values}"
        )
    if steady_k is None:
        raise BoundViolation(f"no repeated configuration up to t_up={horizon}")
    return Schedulable(steady_k, system.o_max + (steady_k - 1) * system.hyperperiod, tuple(samples))


def synchronous_test(system: TaskSystem) -> Verdict:
    """Schedulability of a synchronous system from ``[c, c + P)`` alone."""
    if not system.is_synchronous:
        raise ValueError("synchronous_test requires all offsets to be equal")
    c = system.tasks[0].offset
    _, miss = simulate(system, horizon=c + system.hyperperiod)
    if miss is not None:
        return DeadlineMiss(miss.job, miss.at)
    return Schedulable(1, c)


def leung_test(system: TaskSystem) -> LeungVerdict:
    """Leung's feasibility check. INCORRECT: kept only to exhibit its false negatives.

    Accepts iff no deadline is missed up to O_max + 2P and the configurations
    at O_max + P and O_max + 2P coincide. Schedulable systems whose steady
    phase starts later are wrongly rejected; never use this to decide
    schedulability.
    """
    P, o_max = system.hyperperiod, system.o_max
    miss, samples, _, _ = _run_aligned(system, o_max + 2 * P, early_exit=False)
    if miss is not None:
        return RejectByMiss(miss.job, miss.at)
    c1, c2 = samples[1], samples[2]
    if c1.values != c2.values:
        return RejectByConfigMismatch(c1.sampled_at, c2.sampled_at, c1, c2)
    return Accept()


def predictability_probe(system: TaskSystem, exec_model: ExecutionModel) -> Verdict:
    """Simulate ``[0, t_up)`` with the given execution times; meant for systems that pass exact_test."""
    _, miss = simulate(system, Policy.EDF, exec_model, t_up(system))
    if miss is not None:
        return DeadlineMiss(miss.job, miss.at)
    return Schedulable(None, None)


# --- invariant checks ------------------------------------------------------


def cumulative_execution(trace: ScheduleTrace, n: int) -> list[list[int]]:
    """``cum[i][t]``: ticks task ``i`` ran in ``[0, t)``."""
    per_tick = [[0] * trace.horizon for _ in range(n)]
    for segs in trace.segments:
        for seg in segs:
            if seg.job is not None:
                row = per_tick[seg.job.task_index]
                for t in range(seg.start, seg.end):
                    row[t] += 1
    return [[0, *accumulate(row)] for row in per_tick]


def monotonicity_violations(
    trace: ScheduleTrace, system: TaskSystem, times: Iterable[int] | None = None
) -> list[tuple[int, int, int, int]]:
    """Pairs where e_{i,t} < e_{i,t+P}, as (task, t, e_t, e_{t+P}).

    ``times`` defaults to every instant with ``t + P`` inside the trace.
    """
    P = system.hyperperiod
    cum = cumulative_execution(trace, len(system.tasks))
    candidates = range(trace.horizon - P + 1) if times is None else list(times)
    out = []
    for i, task in enumerate(system.tasks):
        row = cum[i]

        def e(t: int) -> int:
            r = task.offset + (t - task.offset) // task.period * task.period
            return row[t] - row[r]

        for t in candidates:
            if t < task.offset or t + P > trace.horizon:
                continue
            a, b = e(t), e(t + P)
            if a < b:
                out.append((i, t, a, b))
    return out


def periodicity_violations(system: TaskSystem, verdict: Schedulable) -> list[int]:
    """Ticks of the hyperperiod after the detected repeat that differ from the one before.

    The detected repeat is C(s - P) == C(s) with s = O_max + steady_k * P.
    Running-job sets over ``[s, s + P)`` are compared with those over
    ``[s - P, s)`` shifted by P in time and P/T_i in job number. CPU placement
    is not compared: it depends on the placement carried over from before the
    steady phase.
    """
    if verdict.steady_k is None:
        raise ValueError("verdict carries no steady phase")
    P = system.hyperperiod
    s = system.o_max + verdict.steady_k * P
    trace, miss = simulate(system, horizon=s + P)
    if miss is not None:
        raise AssertionError(f"miss {miss} inside an allegedly periodic schedule")
    shifts = [P // task.period for task in system.tasks]
    bad = []
    for t in range(s, s + P):
        earlier = {j.shifted(shifts[j.task_index]) for j in trace.running_at(t - P)}
        if earlier != trace.running_at(t):
            bad.append(t)
    return bad


# --- reports ----------------------------------------------------------------


def report(system: TaskSystem, verdict: Verdict) -> dict[str, Any]:
    miss = None
    if isinstance(verdict, DeadlineMiss):
        miss = {"task": verdict.job.task_index + 1, "job": verdict.job.job_number, "at": verdict.at}
    return {
        "verdict": "schedulable" if verdict.schedulable else "miss",
        "steady_k": verdict.steady_k if isinstance(verdict, Schedulable) else None,
        "t_up": system.t_up,
        "hyperperiod": system.hyperperiod,
        "o_max": system.o_max,
        "c_tau": system.c_tau,
        "miss": miss,
        "configurations": [{"t": c.sampled_at, "e": list(c.values)} for c in verdict.configurations],
    }


def leung_report(verdict: LeungVerdict) -> dict[str, Any]:
    if isinstance(verdict, Accept):
        return {"leung": "accept"}
    if isinstance(verdict, RejectByMiss):
        return {"leung": "reject-miss", "miss": {"task": verdict.job.task_index + 1,
                                                  "job": verdict.job.job_number, "at": verdict.at}}
    return {
        "leung": "reject-config-mismatch",
        "at_1": verdict.at_1,
        "at_2": verdict.at_2,
        "config_1": list(verdict.config_1.values),
        "config_2": list(verdict.config_2.values),
        "diff": list(verdict.diff),
    }

