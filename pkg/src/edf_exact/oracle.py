"""Naive reference simulator used to cross-check the engine.

Nothing here is shared with the engine beyond the model and result types:
the job set, priorities and CPU placement are rebuilt from scratch every tick
and the run-length trace is only encoded at the very end. It is slow on
purpose and is not used by the analysis paths.
"""

from __future__ import annotations

import functools

from .analysis import BoundViolation, Configuration, DeadlineMiss, Schedulable, UndefinedConfigurationError, Verdict
from .engine import WCET, Event, ExecutionModel, Miss, Policy, ScheduleTrace, Segment
from .model import JobId, TaskSystem

_KIND_ORDER = {"completion": 0, "miss": 1, "release": 2}


def _compare(policy: Policy, now: int, a: dict, b: dict) -> int:
    if policy is Policy.LLF:
        lax_a = a["deadline"] - now - (a["budget"] - a["done"])
        lax_b = b["deadline"] - now - (b["budget"] - b["done"])
        if lax_a != lax_b:
            return -1 if lax_a < lax_b else 1
    if a["deadline"] != b["deadline"]:
        return -1 if a["deadline"] < b["deadline"] else 1
    if a["task"] != b["task"]:
        return -1 if a["task"] < b["task"] else 1
    if a["job"] != b["job"]:
        return -1 if a["job"] < b["job"] else 1
    return 0


def _place(previous: list, chosen: list, m: int) -> list:
    placement = [None] * m
    for cpu in range(m):
        if previous[cpu] is not None and previous[cpu] in chosen:
            placement[cpu] = previous[cpu]
    for job in chosen:
        if job in placement:
            continue
        for cpu in range(m):
            if placement[cpu] is None:
                placement[cpu] = job
                break
    return placement


def _encode(history: list[tuple], m: int) -> tuple[tuple[Segment, ...], ...]:
    per_cpu = []
    for cpu in range(m):
        segs: list[Segment] = []
        for t, row in enumerate(history):
            key = row[cpu]
            job = None if key is None else JobId(key[0], key[1])
            if segs and segs[-1].job == job:
                segs[-1] = Segment(segs[-1].start, t + 1, job)
            else:
                segs.append(Segment(t, t + 1, job))
        per_cpu.append(tuple(segs))
    return tuple(per_cpu)


def oracle_simulate(
    system: TaskSystem,
    policy: Policy = Policy.EDF,
    exec_model: ExecutionModel = WCET,
    horizon: int = 0,
    stop_on_miss: bool = True,
) -> tuple[ScheduleTrace, Miss | None]:
    m = system.cpu_count
    tasks = system.tasks
    executed: dict[tuple[int, int], int] = {}
    budgets: dict[tuple[int, int], int] = {}
    watermark = [1] * len(tasks)  # every job below it is finished
    history: list[tuple] = []
    events: list[Event] = []
    misses: list[Miss] = []
    t = 0
    while True:
        # every job released so far, with its state recomputed from the counters
        jobs = []
        for i, task in enumerate(tasks):
            j = watermark[i]
            while True:
                release = task.offset + (j - 1) * task.period
                if release > t:
                    break
                if (i, j) not in budgets:
                    budgets[(i, j)] = exec_model.budget(system, JobId(i, j))
                jobs.append({
                    "task": i, "job": j, "release": release,
                    "deadline": release + task.deadline,
                    "budget": budgets[(i, j)], "done": executed.get((i, j), 0),
                })
                j += 1
        new_misses = [
            Miss(JobId(x["task"], x["job"]), t)
            for x in jobs
            if x["deadline"] == t and x["done"] < x["budget"]
        ]
        misses.extend(new_misses)
        events.extend(Event(t, "miss", x.job) for x in new_misses)
        if (new_misses and stop_on_miss) or t >= horizon:
            break
        events.extend(
            Event(t, "release", JobId(x["task"], x["job"])) for x in jobs if x["release"] == t
        )
        active = [x for x in jobs if x["done"] < x["budget"]]
        active.sort(key=functools.cmp_to_key(lambda a, b: _compare(policy, t, a, b)))
        chosen = [(x["task"], x["job"]) for x in active[:m]]
        previous = list(history[-1]) if history else [None] * m
        row = _place(previous, chosen, m)
        history.append(tuple(row))
        for key in chosen:
            executed[key] = executed.get(key, 0) + 1
            if executed[key] == budgets[key]:
                events.append(Event(t + 1, "completion", JobId(*key)))
        for i in range(len(tasks)):
            while executed.get((i, watermark[i]), 0) == budgets.get((i, watermark[i]), -1):
                watermark[i] += 1
        t += 1
    events.sort(key=lambda e: (e.time, _KIND_ORDER[e.kind], e.job.task_index, e.job.job_number))
    trace = ScheduleTrace(m, len(history), _encode(history, m), tuple(events))
    return trace, (misses[0] if misses else None)


def _expand(trace: ScheduleTrace) -> list[list]:
    rows = [[None] * trace.cpus for _ in range(trace.horizon)]
    for cpu, segs in enumerate(trace.segments):
        for seg in segs:
            for t in range(seg.start, seg.end):
                rows[t][cpu] = seg.job
    return rows


def oracle_configuration(system: TaskSystem, trace: ScheduleTrace, t: int, _rows=None) -> Configuration:
    if any(t < task.offset for task in system.tasks):
        raise UndefinedConfigurationError(f"configuration undefined at t={t}")
    if t > trace.horizon:
        raise ValueError(f"t={t} beyond trace horizon {trace.horizon}")
    rows = _expand(trace) if _rows is None else _rows
    values = []
    for i, task in enumerate(system.tasks):
        r = task.offset
        while r + task.period <= t:
            r += task.period
        values.append(sum(
            1 for u in range(r, t) for job in rows[u] if job is not None and job.task_index == i
        ))
    return Configuration(tuple(values), t)


def oracle_exact_test(system: TaskSystem) -> Verdict:
    """No-early-exit reference test: simulate all of ``[0, t_up)`` naively."""
    P = 1
    for task in system.tasks:
        a, b = P, task.period
        while b:
            a, b = b, a % b
        P = P * task.period // a
    o_max = max(task.offset for task in system.tasks)
    upper = o_max + (sum(task.wcet for task in system.tasks) + 1) * P
    trace, miss = oracle_simulate(system, Policy.EDF, WCET, upper, stop_on_miss=True)
    if miss is not None:
        return DeadlineMiss(miss.job, miss.at)
    rows = _expand(trace)
    samples = [oracle_configuration(system, trace, o_max + k * P, rows)
               for k in range((upper - o_max) // P + 1)]
    if samples[-1].values != samples[-2].values:
        raise BoundViolation(f"C(t_up - P) != C(t_up) for {system}")
    k = next(k for k in range(1, len(samples)) if samples[k].values == samples[k - 1].values)
    return Schedulable(k, o_max + (k - 1) * P, tuple(samples))
