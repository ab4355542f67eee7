"""Discrete-time global scheduler simulation.

Every tick ``t`` the engine

1. records a miss for each active job whose absolute deadline is ``t`` and
   that still has work left,
2. releases the jobs whose release time is ``t``,
3. ranks active jobs under the policy and runs the best ``m`` of them over
   ``[t, t + 1)``, keeping a job on the CPU it used in the previous tick,
4. retires jobs that have received their full budget.

Jobs that miss are not aborted; they keep competing until done. CPU indices are
0-based internally and 1-based in exported JSON, as are task indices.
"""

from __future__ import annotations

import bisect
import enum
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, NamedTuple, Sequence

from .model import JobId, PeriodicTask, TaskSystem, checked

Occupant = JobId | None


class Policy(enum.Enum):
    EDF = "edf"
    LLF = "llf"


@dataclass
class ActiveJob:
    id: JobId
    release: int
    abs_deadline: int
    budget: int
    executed: int = 0

    @property
    def remaining(self) -> int:
        return self.budget - self.executed

    @property
    def done(self) -> bool:
        return self.executed >= self.budget


def edf_key(job: ActiveJob) -> tuple[int, int, int]:
    """Earlier absolute deadline first; ties go to the lower task index, then job number."""
    return (job.abs_deadline, job.id.task_index, job.id.job_number)


def llf_key(job: ActiveJob, now: int) -> tuple[int, int, int, int]:
    laxity = job.abs_deadline - now - job.remaining
    return (laxity, job.abs_deadline, job.id.task_index, job.id.job_number)


def priority_key(policy: Policy, now: int) -> Callable[[ActiveJob], tuple]:
    if policy is Policy.EDF:
        return edf_key
    return lambda job: llf_key(job, now)


@dataclass(frozen=True)
class ExecutionModel:
    """Actual execution time of each job; WCET unless overridden.

    ``draw`` is consulted for jobs absent from ``overrides`` and must be a pure
    function of ``(job, task)`` so that runs stay reproducible.
    """

    overrides: Mapping[JobId, int] = field(default_factory=dict)
    draw: Callable[[JobId, PeriodicTask], int] | None = None

    def budget(self, system: TaskSystem, job: JobId) -> int:
        task = system.tasks[job.task_index]
        if job in self.overrides:
            value = self.overrides[job]
        elif self.draw is not None:
            value = self.draw(job, task)
        else:
            return task.wcet
        if not 1 <= value <= task.wcet:
            raise ValueError(f"execution time {value} of job {job} outside [1, {task.wcet}]")
        return value

    @property
    def is_wcet(self) -> bool:
        return not self.overrides and self.draw is None

    @classmethod
    def seeded_random(cls, seed: int) -> ExecutionModel:
        """Independent uniform draw in [1, C_i] per job, keyed by (seed, job)."""

        def draw(job: JobId, task: PeriodicTask) -> int:
            rng = random.Random(f"{seed}:{job.task_index}:{job.job_number}")
            return rng.randint(1, task.wcet)

        return cls(draw=draw)

    @classmethod
    def reduced_by(cls, amount: int) -> ExecutionModel:
        """Every job runs ``amount`` ticks less than its WCET, but at least one tick."""
        return cls(draw=lambda job, task: max(1, task.wcet - amount))


WCET = ExecutionModel()


class Segment(NamedTuple):
    start: int
    end: int
    job: Occupant


class Event(NamedTuple):
    time: int
    kind: str  # "release" | "completion" | "miss"
    job: JobId


_KIND_RANK = {"completion": 0, "miss": 1, "release": 2}


def event_order(event: Event) -> tuple[int, int, int, int]:
    return (event.time, _KIND_RANK[event.kind], event.job.task_index, event.job.job_number)


class Miss(NamedTuple):
    job: JobId
    at: int


@dataclass(frozen=True)
class ScheduleTrace:
    cpus: int
    horizon: int
    segments: tuple[tuple[Segment, ...], ...]
    events: tuple[Event, ...] = ()

    def occupants_at(self, t: int) -> tuple[Occupant, ...]:
        """The per-CPU occupants of tick ``[t, t + 1)``."""
        if not 0 <= t < self.horizon:
            raise IndexError(f"tick {t} outside trace [0, {self.horizon})")
        return tuple(_segment_at(segs, t).job for segs in self.segments)

    def running_at(self, t: int) -> frozenset[JobId]:
        return frozenset(j for j in self.occupants_at(t) if j is not None)

    def busy_cpus(self, t: int) -> int:
        return sum(j is not None for j in self.occupants_at(t))

    def task_execution(self, task_index: int, start: int, end: int) -> int:
        """Ticks of ``[start, end)`` during which some job of the task ran."""
        total = 0
        for segs in self.segments:
            for seg in segs:
                if seg.job is not None and seg.job.task_index == task_index:
                    lo, hi = max(seg.start, start), min(seg.end, end)
                    if hi > lo:
                        total += hi - lo
        return total

    def to_dict(self) -> dict[str, Any]:
        segments = [
            {
                "cpu": cpu + 1,
                "start": s.start,
                "end": s.end,
                "task": None if s.job is None else s.job.task_index + 1,
                "job": None if s.job is None else s.job.job_number,
            }
            for cpu, segs in enumerate(self.segments)
            for s in segs
        ]
        events = [
            {"time": e.time, "kind": e.kind, "task": e.job.task_index + 1, "job": e.job.job_number}
            for e in self.events
        ]
        return {"cpus": self.cpus, "horizon": self.horizon, "segments": segments, "events": events}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> ScheduleTrace:
        cpus, horizon = int(doc["cpus"]), int(doc["horizon"])
        per_cpu: list[list[Segment]] = [[] for _ in range(cpus)]
        for s in doc["segments"]:
            job = None if s["task"] is None else JobId(s["task"] - 1, s["job"])
            per_cpu[s["cpu"] - 1].append(Segment(s["start"], s["end"], job))
        for segs in per_cpu:
            segs.sort()
        events = tuple(
            Event(e["time"], e["kind"], JobId(e["task"] - 1, e["job"])) for e in doc.get("events", [])
        )
        return cls(cpus, horizon, tuple(tuple(s) for s in per_cpu), events)


def _segment_at(segs: Sequence[Segment], t: int) -> Segment:
    return segs[bisect.bisect_right(segs, t, key=lambda s: s.end)]


def assign_cpus(previous: Sequence[Occupant], selected: Sequence[JobId]) -> list[Occupant]:
    """Place ``selected`` (highest priority first) on CPUs.

    A job that ran in the previous tick keeps its CPU; the others take the
    free CPUs in priority order, lowest index first.
    """
    if len(selected) > len(previous):
        raise ValueError(f"{len(selected)} jobs selected for {len(previous)} CPUs")
    chosen = set(selected)
    assignment: list[Occupant] = [j if j in chosen else None for j in previous]
    placed = {j for j in assignment if j is not None}
    free = iter([cpu for cpu, j in enumerate(assignment) if j is None])
    for job in selected:
        if job not in placed:
            assignment[next(free)] = job
    return assignment


class EngineState:
    """Mutable state of one simulation run; confined to that run."""

    def __init__(
        self,
        system: TaskSystem,
        policy: Policy = Policy.EDF,
        exec_model: ExecutionModel = WCET,
        record_events: bool = True,
    ):
        self.system = system
        self.policy = policy
        self.exec_model = exec_model
        self.record_events = record_events
        self.t = 0
        n = len(system.tasks)
        self.next_job = [1] * n
        self.next_release = [task.offset for task in system.tasks]
        self.latest: list[ActiveJob | None] = [None] * n
        self.active: list[ActiveJob] = []
        self.assignment: list[Occupant] = [None] * system.cpu_count
        self._open: list[list] = [[0, 0, None] for _ in range(system.cpu_count)]
        self._closed: list[list[Segment]] = [[] for _ in range(system.cpu_count)]
        self.events: list[Event] = []
        self.misses: list[Miss] = []

    def check_deadlines(self) -> list[Miss]:
        """Misses of jobs whose deadline is the current instant."""
        found = sorted(
            (Miss(j.id, self.t) for j in self.active if j.abs_deadline == self.t and not j.done),
            key=lambda miss: (miss.job.task_index, miss.job.job_number),
        )
        for miss in found:
            self.misses.append(miss)
            if self.record_events:
                self.events.append(Event(self.t, "miss", miss.job))
        return found

    def release_jobs(self) -> None:
        t = self.t
        for i, task in enumerate(self.system.tasks):
            if self.next_release[i] != t:
                continue
            jid = JobId(i, self.next_job[i])
            job = ActiveJob(jid, t, t + task.deadline, self.exec_model.budget(self.system, jid))
            self.active.append(job)
            self.latest[i] = job
            self.next_job[i] += 1
            self.next_release[i] = checked(t + task.period, "release time")
            if self.record_events:
                self.events.append(Event(t, "release", jid))

    def configuration(self) -> tuple[int, ...] | None:
        """Per-task execution since the latest release, None before O_max."""
        if any(job is None for job in self.latest):
            return None
        return tuple(job.executed for job in self.latest)

    def dispatch(self) -> None:
        """Run the best ``m`` active jobs over ``[t, t + 1)``, then move to ``t + 1``."""
        t = self.t
        ranked = sorted(self.active, key=priority_key(self.policy, t))
        selected = ranked[: self.system.cpu_count]
        self.assignment = assign_cpus(self.assignment, [j.id for j in selected])
        for cpu, occupant in enumerate(self.assignment):
            seg = self._open[cpu]
            if seg[2] != occupant or seg[1] != t:
                if seg[1] > seg[0]:
                    self._closed[cpu].append(Segment(*seg))
                self._open[cpu] = [t, t + 1, occupant]
            else:
                seg[1] = t + 1
        finished = False
        for job in selected:
            job.executed += 1
            if job.done:
                finished = True
                if self.record_events:
                    self.events.append(Event(t + 1, "completion", job.id))
        if finished:
            self.active = [j for j in self.active if not j.done]
        self.t = t + 1

    def step(self) -> EngineState:
        self.check_deadlines()
        self.release_jobs()
        self.dispatch()
        return self

    def trace(self) -> ScheduleTrace:
        segments = []
        for cpu in range(self.system.cpu_count):
            segs = list(self._closed[cpu])
            seg = self._open[cpu]
            if seg[1] > seg[0]:
                segs.append(Segment(*seg))
            segments.append(tuple(segs))
        events = sorted(self.events, key=event_order)
        return ScheduleTrace(self.system.cpu_count, self.t, tuple(segments), tuple(events))


def step(state: EngineState) -> EngineState:
    return state.step()


def simulate(
    system: TaskSystem,
    policy: Policy = Policy.EDF,
    exec_model: ExecutionModel = WCET,
    horizon: int = 0,
    stop_on_miss: bool = True,
) -> tuple[ScheduleTrace, Miss | None]:
    """Simulate ``[0, horizon)`` and report the first deadline miss, if any.

    Deadlines up to and including ``horizon`` are checked. With
    ``stop_on_miss`` the trace ends at the instant of the first miss.
    """
    checked(horizon, "horizon")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    state = EngineState(system, policy, exec_model)
    while True:
        if state.check_deadlines() and stop_on_miss:
            break
        if state.t >= horizon:
            break
        state.release_jobs()
        state.dispatch()
    return state.trace(), (state.misses[0] if state.misses else None)
