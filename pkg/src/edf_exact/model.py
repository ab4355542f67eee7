"""Task-system data model.

A periodic constrained-deadline task is the tuple (offset, wcet, deadline,
period) in integer ticks. Job ``j`` (1-based) of task ``i`` is released at
``offset + (j - 1) * period`` and must complete within
``[release, release + deadline)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable

# Ticks are exchanged with other tools as signed 64-bit integers.
MAX_TICKS = 2**63 - 1


class TickOverflowError(ArithmeticError):
    """A tick quantity left the representable range."""


class TaskSetFormatError(ValueError):
    """The task-set document is malformed; ``location`` points at the culprit."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


def checked(value: int, what: str = "tick value") -> int:
    if value > MAX_TICKS or value < -MAX_TICKS - 1:
        raise TickOverflowError(f"{what} {value} exceeds the 64-bit tick range")
    return value


@dataclass(frozen=True)
class PeriodicTask:
    offset: int
    wcet: int
    deadline: int
    period: int

    @property
    def utilization(self) -> Fraction:
        return Fraction(self.wcet, self.period)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.offset, self.wcet, self.deadline, self.period)


@dataclass(frozen=True)
class JobId:
    task_index: int  # 0-based position in TaskSystem.tasks
    job_number: int  # 1-based

    def shifted(self, jobs: int) -> JobId:
        return JobId(self.task_index, self.job_number + jobs)

    def __str__(self) -> str:
        return f"tau{self.task_index + 1},{self.job_number}"


@dataclass(frozen=True)
class TaskSystem:
    tasks: tuple[PeriodicTask, ...]
    cpu_count: int

    def __init__(self, tasks: Iterable[PeriodicTask | tuple[int, int, int, int]], cpu_count: int):
        normalized = tuple(
            t if isinstance(t, PeriodicTask) else PeriodicTask(*t) for t in tasks
        )
        object.__setattr__(self, "tasks", normalized)
        object.__setattr__(self, "cpu_count", cpu_count)

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def hyperperiod(self) -> int:
        return hyperperiod(self)

    @property
    def o_max(self) -> int:
        return max(t.offset for t in self.tasks)

    @property
    def c_tau(self) -> int:
        return sum(t.wcet for t in self.tasks)

    @property
    def t_up(self) -> int:
        return t_up(self)

    @property
    def utilization(self) -> Fraction:
        return sum((t.utilization for t in self.tasks), Fraction(0))

    @property
    def is_synchronous(self) -> bool:
        return len({t.offset for t in self.tasks}) == 1

    def jobs_per_hyperperiod(self, task_index: int) -> int:
        return self.hyperperiod // self.tasks[task_index].period


@dataclass(frozen=True)
class Violation:
    task: int | None  # 0-based index, None for system-level rules
    field: str
    rule: str

    def __str__(self) -> str:
        where = "system" if self.task is None else f"task {self.task + 1}"
        return f"{where}: {self.field}: {self.rule}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def raise_for_violations(self) -> None:
        if self.violations:
            raise ValueError("invalid task system: " + "; ".join(map(str, self.violations)))


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate(system: TaskSystem) -> ValidationReport:
    """Collect every model-rule violation instead of stopping at the first."""
    out: list[Violation] = []
    if not _is_int(system.cpu_count):
        out.append(Violation(None, "cpus", "must be an integer"))
    elif system.cpu_count < 1:
        out.append(Violation(None, "cpus", "must be >= 1"))
    if not system.tasks:
        out.append(Violation(None, "tasks", "must be non-empty"))
    for i, task in enumerate(system.tasks):
        bad_type = False
        for name in ("offset", "wcet", "deadline", "period"):
            value = getattr(task, name)
            if not _is_int(value):
                out.append(Violation(i, name, "must be an integer"))
                bad_type = True
            elif value > MAX_TICKS:
                out.append(Violation(i, name, "exceeds the 64-bit tick range"))
        if bad_type:
            continue
        if task.offset < 0:
            out.append(Violation(i, "offset", "must be >= 0"))
        if task.wcet < 1:
            out.append(Violation(i, "wcet", "wcet must be >= 1"))
        if task.deadline < 1:
            out.append(Violation(i, "deadline", "must be >= 1"))
        if task.period < 1:
            out.append(Violation(i, "period", "must be >= 1"))
        if task.deadline > task.period:
            out.append(Violation(i, "deadline", "deadline exceeds period"))
    return ValidationReport(tuple(out))


def hyperperiod(system: TaskSystem) -> int:
    """lcm of all periods."""
    return checked(reduce(math.lcm, (t.period for t in system.tasks)), "hyperperiod")


def t_up(system: TaskSystem) -> int:
    """End of the feasibility interval: O_max + (C_tau + 1) * P."""
    return checked(system.o_max + (system.c_tau + 1) * hyperperiod(system), "t_up")


def release_time(system: TaskSystem, job: JobId) -> int:
    if job.job_number < 1:
        raise ValueError(f"job numbers start at 1, got {job.job_number}")
    task = system.tasks[job.task_index]
    return checked(task.offset + (job.job_number - 1) * task.period, "release time")


def abs_deadline(system: TaskSystem, job: JobId) -> int:
    return checked(release_time(system, job) + system.tasks[job.task_index].deadline,
                   "absolute deadline")


def last_release(task: PeriodicTask, t: int) -> tuple[int, int] | None:
    """(job_number, release) of the latest release at or before ``t``."""
    if t < task.offset:
        return None
    j = (t - task.offset) // task.period + 1
    return j, task.offset + (j - 1) * task.period


# --- task-set files -------------------------------------------------------

_TASK_KEYS = ("offset", "wcet", "deadline", "period")


def to_dict(system: TaskSystem) -> dict[str, Any]:
    return {
        "cpus": system.cpu_count,
        "tasks": [{k: getattr(t, k) for k in _TASK_KEYS} for t in system.tasks],
    }


def dumps(system: TaskSystem) -> str:
    """Canonical serialization: sorted keys, integers only, trailing newline."""
    return canonical_json(to_dict(system))


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def from_dict(doc: Any) -> TaskSystem:
    if not isinstance(doc, dict):
        raise TaskSetFormatError("expected an object with 'cpus' and 'tasks'")
    for key in ("cpus", "tasks"):
        if key not in doc:
            raise TaskSetFormatError(f"missing key {key!r}")
    extra = set(doc) - {"cpus", "tasks"}
    if extra:
        raise TaskSetFormatError(f"unknown keys {sorted(extra)}")
    if not _is_int(doc["cpus"]):
        raise TaskSetFormatError("must be an integer", "$.cpus")
    if not isinstance(doc["tasks"], list):
        raise TaskSetFormatError("must be a list", "$.tasks")
    tasks = []
    for i, entry in enumerate(doc["tasks"]):
        loc = f"$.tasks[{i}]"
        if not isinstance(entry, dict):
            raise TaskSetFormatError("expected an object", loc)
        missing = [k for k in _TASK_KEYS if k not in entry]
        if missing:
            raise TaskSetFormatError(f"missing keys {missing}", loc)
        extra = set(entry) - set(_TASK_KEYS)
        if extra:
            raise TaskSetFormatError(f"unknown keys {sorted(extra)}", loc)
        for k in _TASK_KEYS:
            if not _is_int(entry[k]):
                raise TaskSetFormatError("must be an integer", f"{loc}.{k}")
        tasks.append(PeriodicTask(*(entry[k] for k in _TASK_KEYS)))
    return TaskSystem(tasks, doc["cpus"])


def loads(text: str) -> TaskSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TaskSetFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    return from_dict(doc)
