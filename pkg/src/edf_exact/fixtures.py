"""Built-in task systems on which [0, O_max + 2P] is too short.

``ce1``: three tasks on two CPUs. Configurations at O_max + P = 16 and
O_max + 2P = 28 differ; the schedule repeats only from 28 on. The published
parameter line for the first task reads "D2 = T2 = 3"; the subscripts are a
misprint for its own deadline and period (periods 3, 4, 6 give P = 12), so the
fixture uses D1 = T1 = 3.

``ce2``: four tasks with period 161 and total utilization exactly 2 on two
CPUs; the schedule needs dozens of hyperperiods to repeat.
"""

from __future__ import annotations

from .model import TaskSystem

CE1 = TaskSystem([(0, 2, 3, 3), (4, 3, 4, 4), (1, 3, 6, 6)], cpu_count=2)

CE2 = TaskSystem(
    [(225, 90, 161, 161), (115, 40, 161, 161), (0, 72, 161, 161), (129, 120, 161, 161)],
    cpu_count=2,
)

COUNTEREXAMPLES = {"ce1": CE1, "ce2": CE2}
