"""Shared builders for the property campaigns."""

from __future__ import annotations

import random
from fractions import Fraction

from edf_exact.generator import GeneratorSpec, generate
from edf_exact.model import TaskSystem

# Divisors of 60: any subset has an lcm of at most 60.
PERIODS_P60 = (2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60)


def campaign_system(seed: int) -> TaskSystem:
    """System ``seed`` of the bounded campaign: n <= 4, m <= 3, P <= 60."""
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    m = rng.randint(1, 3)
    pool = tuple(sorted(rng.sample(PERIODS_P60, rng.randint(1, 4))))
    cap = min(m, n)
    if Fraction(n, max(pool)) > cap:
        pool = (*pool, 60)
    floor = Fraction(n, max(pool))
    target = floor + (cap - floor) * Fraction(rng.randint(1, 20), 20)
    spec = GeneratorSpec(
        seed=seed,
        task_count=n,
        cpu_count=m,
        period_pool=pool,
        max_offset=rng.choice((0, 3, 10, 25)),
        utilization_target=target,
        deadline_mode=rng.choice(("implicit", "constrained")),
    )
    return generate(spec)


def fuzz_system(seed: int) -> TaskSystem:
    """Small system for engine/oracle equivalence: n <= 4, m <= 3, offsets <= 6, wcet <= 5."""
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    tasks = []
    for _ in range(n):
        period = rng.choice((2, 3, 4, 6))
        wcet = rng.randint(1, min(5, period))
        deadline = rng.randint(wcet, period) if rng.random() < 0.5 else period
        tasks.append((rng.randint(0, 6), wcet, deadline, period))
    return TaskSystem(tasks, rng.randint(1, 3))
