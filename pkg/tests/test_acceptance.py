"""Exit criteria. Each test prints one PASS/FAIL line (see the terminal summary)."""

from __future__ import annotations

import itertools
import json
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from edf_exact import analysis, model
from edf_exact.analysis import (
    RejectByConfigMismatch,
    Schedulable,
    config_dominates,
    configuration_at,
    exact_test,
    leung_test,
    predictability_probe,
)
from edf_exact.engine import ActiveJob, ExecutionModel, Policy, edf_key, simulate
from edf_exact.fixtures import CE1, CE2
from edf_exact.model import JobId, TaskSystem
from edf_exact.oracle import oracle_configuration, oracle_simulate

from helpers import campaign_system, fuzz_system

CE1_C16 = (1, 0, 2)  # frozen from the oracle run
CE1_C28 = (1, 0, 1)

CAMPAIGN_SIZE = 500


@pytest.fixture(scope="module")
def campaign():
    """(system, early-exit verdict, literal verdict, seconds) for the 500 campaign systems."""
    start = time.perf_counter()
    rows = []
    for seed in range(CAMPAIGN_SIZE):
        system = campaign_system(seed)
        rows.append((system, exact_test(system), exact_test(system, early_exit=False)))
    return rows, time.perf_counter() - start


def test_ac01_ce1_verdict(criterion):
    """AC1 CE1 verdict and interval facts"""
    start = time.perf_counter()
    assert (CE1.hyperperiod, CE1.o_max, CE1.c_tau, CE1.t_up) == (12, 4, 8, 112)
    verdict = exact_test(CE1)
    assert isinstance(verdict, Schedulable)
    trace, miss = simulate(CE1, horizon=112)
    assert miss is None
    c16, c28 = configuration_at(trace, CE1, 16), configuration_at(trace, CE1, 28)
    assert (c16.values, c28.values) == (CE1_C16, CE1_C28)
    assert c16 != c28
    assert config_dominates(c16, c28)
    assert verdict.steady_k >= 3
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    criterion.append(f"steady_k={verdict.steady_k}, {elapsed:.3f}s")


def test_ac02_leung_refutation(criterion):
    """AC2 Leung test rejects CE1 although it is schedulable"""
    start = time.perf_counter()
    leung = leung_test(CE1)
    assert isinstance(leung, RejectByConfigMismatch)
    assert (leung.at_1, leung.at_2) == (16, 28)
    assert exact_test(CE1).schedulable
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    criterion.append(f"diff={leung.diff}, {elapsed:.3f}s")


def test_ac03_ce2_verdict(criterion):
    """AC3 CE2 verdict"""
    start = time.perf_counter()
    assert (CE2.hyperperiod, CE2.c_tau, CE2.t_up) == (161, 322, 52228)
    assert CE2.utilization == Fraction(2) == CE2.cpu_count
    verdict = exact_test(CE2)
    assert isinstance(verdict, Schedulable)
    assert 2 < verdict.steady_k <= CE2.c_tau + 1 == 323
    assert analysis.report(CE2, verdict)["steady_k"] == verdict.steady_k
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    criterion.append(f"observed steady_k={verdict.steady_k}, {elapsed:.3f}s")


def test_ac04_lemma4_bound(criterion, campaign):
    """AC4 steady_k <= C_tau + 1 and early exit == literal test (500 systems)"""
    rows, elapsed = campaign
    schedulable = 0
    worst = 0
    for system, early, literal in rows:
        assert len(system.tasks) <= 4 and system.cpu_count <= 3 and system.hyperperiod <= 60
        assert early.schedulable == literal.schedulable
        if early.schedulable:
            schedulable += 1
            assert early.steady_k <= system.c_tau + 1
            assert early.steady_k == literal.steady_k
            worst = max(worst, early.steady_k)
        else:
            assert (early.job, early.at) == (literal.job, literal.at)
    assert elapsed < 60.0
    criterion.append(f"{schedulable}/{len(rows)} schedulable, max steady_k={worst}, {elapsed:.1f}s")


def _schedulable_runs(rows):
    for system, verdict, _ in rows:
        if verdict.schedulable:
            yield system, verdict


def test_ac05_lemma3_monotonicity(criterion, campaign):
    """AC5 e_{i,t} >= e_{i,t+P} on every schedulable run"""
    rows, _ = campaign
    violations = 0
    checked = 0
    for system, verdict in _schedulable_runs(rows):
        horizon = system.o_max + (verdict.steady_k + 1) * system.hyperperiod
        trace, _ = simulate(system, horizon=horizon)
        violations += len(analysis.monotonicity_violations(trace, system))
        checked += 1
    for system in (CE1, CE2):
        trace, miss = simulate(system, horizon=system.t_up)
        assert miss is None
        violations += len(analysis.monotonicity_violations(trace, system))
        checked += 1
    assert violations == 0
    criterion.append(f"{checked} runs, every tick")


def test_ac06_lemma2_periodicity(criterion, campaign):
    """AC6 one extra hyperperiod past the steady point repeats the previous one"""
    rows, _ = campaign
    runs = list(_schedulable_runs(rows)) + [(CE1, exact_test(CE1)), (CE2, exact_test(CE2))]
    violations = sum(len(analysis.periodicity_violations(s, v)) for s, v in runs)
    assert violations == 0
    criterion.append(f"{len(runs)} runs")


def test_ac07_lemma1_predictability(criterion, campaign):
    """AC7 shorter execution times never cause a miss"""
    rows, _ = campaign
    systems = [CE1] + [s for s, _ in _schedulable_runs(rows)][:50]
    assert len(systems) == 51
    misses = 0
    for system in systems:
        for seed in range(20):
            if not predictability_probe(system, ExecutionModel.seeded_random(seed)).schedulable:
                misses += 1
    assert misses == 0
    criterion.append(f"{len(systems)} systems x 20 models")


def test_ac08_oracle_equivalence(criterion):
    """AC8 engine and oracle agree on 1000 fuzz cases"""
    start = time.perf_counter()
    cases = 1000
    for seed in range(cases):
        system = fuzz_system(seed)
        rng = random.Random(seed)
        horizon = rng.randint(system.o_max, 240)
        policy = (Policy.EDF, Policy.LLF)[seed % 2]
        engine_trace, engine_miss = simulate(system, policy, horizon=horizon, stop_on_miss=False)
        oracle_trace, oracle_miss = oracle_simulate(system, policy, horizon=horizon, stop_on_miss=False)
        assert engine_trace == oracle_trace, seed
        assert engine_miss == oracle_miss, seed
        for t in rng.sample(range(system.o_max, horizon + 1), min(5, horizon + 1 - system.o_max)):
            assert configuration_at(engine_trace, system, t) == oracle_configuration(system, oracle_trace, t)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    criterion.append(f"{cases} cases, {elapsed:.1f}s")


def test_ac09_uniprocessor_optimality(criterion):
    """AC9 synchronous implicit-deadline systems on one CPU: schedulable iff U <= 1"""
    cases = mismatches = 0
    for n in (1, 2, 3):
        for periods in itertools.combinations_with_replacement((2, 3, 4, 6), n):
            for wcets in itertools.product(*(range(1, p + 1) for p in periods)):
                u = sum(Fraction(c, p) for c, p in zip(wcets, periods))
                if u > Fraction(3, 2):
                    continue
                system = TaskSystem([(0, c, p, p) for c, p in zip(wcets, periods)], 1)
                cases += 1
                if exact_test(system).schedulable != (u <= 1):
                    mismatches += 1
    assert mismatches == 0
    criterion.append(f"{cases} systems")


def test_ac10_tie_breaker_contract(criterion):
    """AC10 edf_key is total, deterministic and request-dependent"""
    P = 12
    periods = {0: 3, 1: 4, 2: 6, 3: 12}
    jobs = [
        ActiveJob(JobId(i, j), 0, d, 1)
        for d in range(1, 13)
        for i in periods
        for j in range(1, 4)
    ]
    pairs = 0
    for a, b in itertools.permutations(jobs, 2):
        ka, kb = edf_key(a), edf_key(b)
        assert (ka < kb) != (kb < ka)
        assert edf_key(a) == ka
        a2 = ActiveJob(a.id.shifted(P // periods[a.id.task_index]), P, a.abs_deadline + P, 1)
        b2 = ActiveJob(b.id.shifted(P // periods[b.id.task_index]), P, b.abs_deadline + P, 1)
        assert (ka < kb) == (edf_key(a2) < edf_key(b2))
        pairs += 1
    criterion.append(f"{pairs} ordered pairs")


def _cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "edf_exact.cli", *args], capture_output=True, text=True, cwd=cwd
    )


def test_ac11_cli_contract(criterion, tmp_path):
    """AC11 CLI round trip, exit codes and counterexample report"""
    for name in ("ce1", "ce2"):
        emitted = _cli("counterexample", name, "emit")
        assert emitted.returncode == 0
        assert model.dumps(model.loads(emitted.stdout)) == emitted.stdout
    generated = _cli("generate", "--seed", "42")
    assert model.dumps(model.loads(generated.stdout)) == generated.stdout

    (tmp_path / "ce1.json").write_text(_cli("counterexample", "ce1", "emit").stdout)
    (tmp_path / "miss.json").write_text(model.dumps(TaskSystem([(0, 3, 4, 4), (0, 3, 4, 4)], 1)))
    (tmp_path / "garbage.json").write_text("not json")
    assert _cli("analyze", "ce1.json", cwd=tmp_path).returncode == 0
    assert _cli("analyze", "miss.json", cwd=tmp_path).returncode == 1
    assert _cli("analyze", "garbage.json", cwd=tmp_path).returncode == 2
    assert _cli("counterexample", "ce9", "run").returncode == 2

    run = _cli("counterexample", "ce1", "run")
    assert run.returncode == 0
    assert "SCHEDULABLE" in run.stdout
    assert "reject: C(16)" in run.stdout and "C(28)" in run.stdout
    report = json.loads(_cli("analyze", "ce1.json", "--report", "json", cwd=tmp_path).stdout)
    assert report["verdict"] == "schedulable"
    criterion.append("exit codes 0/1/2 observed")
