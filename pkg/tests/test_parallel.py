import pytest

from bestarm import (
    BUDGET_EXCEEDED,
    OK,
    Instance,
    SamplingOracle,
    complexity_guessing,
    known_complexity,
    parallel_simulation,
    scheduled_copies,
)
from bestarm.parallel import copy_seed
from bestarm.solvers import known_complexity_plan

TWO_ARM = Instance.from_means((1.0, 0.5), label="two-arm")
TRIPLE = Instance.from_means((1.0, 0.75, 0.5), label="triple")


class TestSchedule:
    def test_iteration_four_advances_first_three_copies(self):
        assert scheduled_copies(4) == [1, 2, 3]

    def test_small_iterations(self):
        assert scheduled_copies(1) == [1]
        assert scheduled_copies(2) == [1, 2]
        assert scheduled_copies(3) == [1]
        assert scheduled_copies(6) == [1, 2]
        assert scheduled_copies(8) == [1, 2, 3, 4]

    def test_rejects_nonpositive_iteration(self):
        with pytest.raises(ValueError):
            scheduled_copies(0)

    def test_copy_rate_halves_up_the_ladder(self):
        grants = {k: 0 for k in range(1, 6)}
        for t in range(1, 1025):
            for k in scheduled_copies(t):
                if k in grants:
                    grants[k] += 1
        assert grants == {1: 1024, 2: 512, 3: 256, 4: 128, 5: 64}


class TestParallelSimulation:
    def test_single_copy_matches_direct_run_at_half_delta(self):
        for seed in range(200):
            wrapped = parallel_simulation(TWO_ARM, 0.02, seed=seed, budget=None,
                                          max_copies=1)
            oracle = SamplingOracle.for_instance(TWO_ARM, seed=copy_seed(seed, 1))
            direct = complexity_guessing(oracle, TWO_ARM, 0.01, budget=None)
            assert wrapped == direct

    def test_returns_best_arm(self):
        hits = 0
        for seed in range(40):
            out = parallel_simulation(TRIPLE, 0.01, seed=seed, budget=None)
            assert out.status == OK
            assert out.total_samples == sum(out.per_arm_samples)
            hits += out.arm == 0
        assert hits >= 38

    def test_accounts_at_least_the_winning_copy(self):
        out = parallel_simulation(TWO_ARM, 0.02, seed=3, budget=None)
        solo = parallel_simulation(TWO_ARM, 0.02, seed=3, budget=None, max_copies=1)
        if out.arm == solo.arm and out.accepted_guess_t == solo.accepted_guess_t:
            # ladder totals include the other copies' granted draws
            assert out.total_samples >= solo.total_samples

    def test_budget_error_propagates(self):
        out = parallel_simulation(TWO_ARM, 0.01, seed=0, budget=2000)
        assert out.status == BUDGET_EXCEEDED

    def test_custom_inner_plan_factory(self):
        H = 4.0

        def inner(oracle, instance, delta_k):
            return known_complexity_plan(oracle, instance, H, delta_k)

        out = parallel_simulation(TWO_ARM, 0.02, inner, seed=5, budget=None)
        assert out.status == OK
        oracle = SamplingOracle.for_instance(TWO_ARM, seed=copy_seed(5, 1))
        direct = known_complexity(oracle, TWO_ARM, H, 0.01, budget=None)
        solo = parallel_simulation(TWO_ARM, 0.02, inner, seed=5, budget=None, max_copies=1)
        assert solo == direct

    def test_replay_determinism(self):
        runs = [parallel_simulation(TRIPLE, 0.01, seed=21, budget=None) for _ in range(2)]
        assert runs[0] == runs[1]

    def test_rejects_bad_delta(self):
        with pytest.raises(ValueError):
            parallel_simulation(TWO_ARM, 0.0, seed=0)
