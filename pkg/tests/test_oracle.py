import random

import pytest

from edf_exact.analysis import UndefinedConfigurationError, configuration_at, exact_test
from edf_exact.engine import Policy, Segment, simulate
from edf_exact.model import JobId, TaskSystem
from edf_exact.oracle import oracle_configuration, oracle_exact_test, oracle_simulate

from helpers import fuzz_system


def test_ce1_trace_matches_engine(ce1):
    assert oracle_simulate(ce1, horizon=112) == simulate(ce1, horizon=112)


def test_empty_horizon(ce1):
    trace, miss = oracle_simulate(ce1, horizon=0)
    assert trace.horizon == 0 and miss is None


def test_single_task_by_hand():
    trace, miss = oracle_simulate(TaskSystem([(0, 2, 3, 3)], 1), horizon=6)
    job1, job2 = JobId(0, 1), JobId(0, 2)
    assert trace.segments == (
        (Segment(0, 2, job1), Segment(2, 3, None), Segment(3, 5, job2), Segment(5, 6, None)),
    )
    assert miss is None


def test_overload_miss(overloaded_uni):
    _, miss = oracle_simulate(overloaded_uni, horizon=8)
    assert miss == (JobId(1, 1), 4)


@pytest.mark.parametrize("t", [16, 17, 28, 29, 40])
def test_configuration_matches_analysis(ce1, t):
    trace, _ = oracle_simulate(ce1, horizon=41)
    assert oracle_configuration(ce1, trace, t) == configuration_at(trace, ce1, t)


def test_golden_ce1_vectors(ce1):
    # the values frozen in test_analysis.CE1_CONFIGS
    trace, _ = oracle_simulate(ce1, horizon=41)
    got = {t: oracle_configuration(ce1, trace, t).values for t in (4, 16, 17, 28, 29, 40)}
    assert got == {4: (1, 0, 3), 16: (1, 0, 2), 17: (2, 0, 3), 28: (1, 0, 1), 29: (2, 0, 2), 40: (1, 0, 1)}


def test_release_at_o_max_counts_zero(ce1):
    trace, _ = oracle_simulate(ce1, horizon=5)
    assert oracle_configuration(ce1, trace, 4).values[1] == 0


def test_configuration_undefined_before_o_max(ce1):
    trace, _ = oracle_simulate(ce1, horizon=5)
    with pytest.raises(UndefinedConfigurationError):
        oracle_configuration(ce1, trace, 3)


@pytest.mark.parametrize("seed", range(100))
def test_fuzz_equivalence(seed):
    system = fuzz_system(seed)
    rng = random.Random(seed)
    horizon = rng.randint(0, 240)
    policy = rng.choice(list(Policy))
    engine = simulate(system, policy, horizon=horizon, stop_on_miss=False)
    assert oracle_simulate(system, policy, horizon=horizon, stop_on_miss=False) == engine


@pytest.mark.parametrize("seed", range(40))
def test_verdict_equivalence(seed):
    system = fuzz_system(seed)
    if system.t_up > 2000:
        pytest.skip("outside the t_up <= 2000 subset")
    a, b = exact_test(system), oracle_exact_test(system)
    assert a.schedulable == b.schedulable
    if a.schedulable:
        assert a.steady_k == b.steady_k
    else:
        assert (a.job, a.at) == (b.job, b.at)
