"""Seeded random task-set generation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import PeriodicTask, TaskSystem, validate


class GeneratorSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    task_count: int
    cpu_count: int
    period_pool: tuple[int, ...]
    max_offset: int
    utilization_target: Fraction
    deadline_mode: str = "implicit"  # or "constrained"

    def check(self) -> None:
        """Raise GeneratorSpecError when no system can meet the spec."""
        if self.task_count < 1:
            raise GeneratorSpecError("task count must be >= 1")
        if self.cpu_count < 1:
            raise GeneratorSpecError("cpu count must be >= 1")
        if not self.period_pool or min(self.period_pool) < 1:
            raise GeneratorSpecError("period pool must be non-empty with periods >= 1")
        if self.max_offset < 0:
            raise GeneratorSpecError("max offset must be >= 0")
        if self.deadline_mode not in ("implicit", "constrained"):
            raise GeneratorSpecError(f"unknown deadline mode {self.deadline_mode!r}")
        u = Fraction(self.utilization_target)
        if u <= 0:
            raise GeneratorSpecError("utilization target must be > 0")
        if u > self.cpu_count:
            raise GeneratorSpecError(
                f"utilization target {u} exceeds the capacity of {self.cpu_count} CPUs"
            )
        if u > self.task_count:
            raise GeneratorSpecError(f"{self.task_count} tasks cannot reach utilization {u}")
        floor = Fraction(self.task_count, max(self.period_pool))
        if u < floor:
            raise GeneratorSpecError(
                f"utilization target {u} is below {floor}, the least reachable with "
                f"{self.task_count} tasks of wcet >= 1 and periods <= {max(self.period_pool)}"
            )


def uunifast(rng: random.Random, n: int, total: float) -> list[float]:
    shares = []
    remaining = total
    for i in range(1, n):
        nxt = remaining * rng.random() ** (1.0 / (n - i))
        shares.append(remaining - nxt)
        remaining = nxt
    shares.append(remaining)
    return shares


def clamp_shares(shares: list[float]) -> list[float]:
    """Cap every share at 1, handing the excess to uncapped shares pro rata."""
    shares = list(shares)
    while True:
        excess = sum(max(0.0, u - 1.0) for u in shares)
        if excess <= 1e-12:
            return [min(u, 1.0) for u in shares]
        shares = [min(u, 1.0) for u in shares]
        room = [1.0 - u for u in shares]
        total_room = sum(room)
        if total_room <= 1e-12:
            return shares
        shares = [u + excess * r / total_room for u, r in zip(shares, room)]


def generate(spec: GeneratorSpec) -> TaskSystem:
    """Draw one system; identical specs (including the seed) give identical systems.

    Per-task utilizations come from UUniFast, with shares above 1 clamped and
    the excess spread over the others; each wcet is the share times the period, rounded, clamped to
    ``[1, period]``.
    """
    spec.check()
    rng = random.Random(spec.seed)
    pool: Sequence[int] = sorted(set(spec.period_pool))
    target = float(spec.utilization_target)
    periods = [rng.choice(pool) for _ in range(spec.task_count)]
    shares = clamp_shares(uunifast(rng, spec.task_count, target))
    tasks = []
    for share, period in zip(shares, periods):
        wcet = min(period, max(1, round(share * period)))
        if spec.deadline_mode == "implicit":
            deadline = period
        else:
            deadline = rng.randint(wcet, period)
        tasks.append(PeriodicTask(rng.randint(0, spec.max_offset), wcet, deadline, period))
    system = TaskSystem(tasks, spec.cpu_count)
    validate(system).raise_for_violations()
    return system
