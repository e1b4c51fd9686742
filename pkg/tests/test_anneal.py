import numpy as np
import pytest

from helpers import all_assignments

from qubosplit import QuboProblem, Schedule, anneal, default_schedule, evaluate, run_trials, sweep
from qubosplit.anneal import _kernel_inputs, _run_sweeps


def random_problem(rng, n, density=0.6):
    quad = {
        (i, j): float(rng.normal())
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    }
    return QuboProblem(n, linear=rng.normal(size=n), quadratic=quad, offset=float(rng.normal()))


def incremental_flip_gain(problem, x, i):
    """Flip gain from the sparse quadratic row, as the sampler computes it."""
    indptr, indices, values = problem.symmetric_csr()
    field = problem.linear[i]
    for k in range(indptr[i], indptr[i + 1]):
        field += values[k] * x[indices[k]]
    return field if x[i] == 0 else -field


class TestSchedule:
    def test_geometric_endpoints(self):
        sch = Schedule(t_start=10.0, t_end=0.01, sweeps=100)
        temps = sch.temperatures()
        assert temps[0] == pytest.approx(10.0)
        assert temps[-1] == pytest.approx(0.01)
        assert np.all(np.diff(temps) < 0)

    def test_single_sweep(self):
        assert Schedule(t_start=2.0, t_end=1.0, sweeps=1).temperatures().tolist() == [2.0]

    def test_validation(self):
        with pytest.raises(ValueError):
            Schedule(t_start=1.0, t_end=2.0)
        with pytest.raises(ValueError):
            Schedule(t_start=1.0, t_end=0.5, sweeps=0)
        with pytest.raises(ValueError):
            Schedule(t_start=1.0, t_end=0.5, kind="linear")

    def test_default_schedule_from_problem(self):
        p = QuboProblem(3, linear=[-7.0, 2.0, 0.5])
        sch = default_schedule(p)
        assert sch.t_start == 7.0
        assert sch.t_end == pytest.approx(7e-3)
        assert sch.sweeps == 10000
        tiny = QuboProblem(2, linear=[0.1, -0.2])
        assert default_schedule(tiny).t_start == 1.0


class TestSweep:
    def test_strictly_improving_move_always_accepted(self):
        p = QuboProblem(1, linear=[-2.0])
        rng = np.random.default_rng(0)
        state = sweep(p, [0], temperature=1e-9, rng=rng)
        assert state.tolist() == [1]

    def test_zero_gain_accepted_with_probability_one(self):
        # all-zero problem: every proposal has gain 0, so every bit flips each sweep
        p = QuboProblem(5)
        rng = np.random.default_rng(1)
        state = np.array([0, 1, 0, 1, 1], dtype=np.uint8)
        out = sweep(p, state, temperature=0.5, rng=rng)
        assert np.array_equal(out, 1 - state)

    def test_input_state_not_mutated(self):
        p = QuboProblem(3, linear=[-1.0, -1.0, -1.0])
        state = np.zeros(3, dtype=np.uint8)
        sweep(p, state, temperature=0.01, rng=np.random.default_rng(2))
        assert state.tolist() == [0, 0, 0]

    @pytest.mark.parametrize("seed", range(5))
    def test_incremental_gain_matches_full_reevaluation(self, seed):
        rng = np.random.default_rng(700 + seed)
        p = random_problem(rng, 20)
        for _ in range(10):
            x = rng.integers(0, 2, size=20).astype(np.uint8)
            base = evaluate(p, x)
            for i in range(20):
                flipped = x.copy()
                flipped[i] ^= 1
                full_delta = evaluate(p, flipped) - base
                assert incremental_flip_gain(p, x, i) == pytest.approx(full_delta, abs=1e-12)

    def test_temperature_must_be_positive(self):
        with pytest.raises(ValueError):
            sweep(QuboProblem(2), [0, 1], temperature=0.0, rng=np.random.default_rng(0))


class TestAnneal:
    def test_single_variable_ground_state_any_seed(self):
        p = QuboProblem(1, linear=[-2.0], offset=1.0)
        sch = default_schedule(p, sweeps=50)
        for seed in range(10):
            result = anneal(p, sch, seed)
            assert result.assignment.tolist() == [1]
            assert result.energy == -1.0

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(5)
        p = random_problem(rng, 12)
        sch = default_schedule(p, sweeps=300)
        a = anneal(p, sch, seed=99)
        b = anneal(p, sch, seed=99)
        assert np.array_equal(a.assignment, b.assignment)
        assert a.energy == b.energy

    def test_energy_field_matches_evaluate(self):
        rng = np.random.default_rng(6)
        p = random_problem(rng, 10)
        result = anneal(p, default_schedule(p, sweeps=200), seed=3)
        assert result.energy == evaluate(p, result.assignment)

    def test_finds_exhaustive_minimum_on_most_seeds(self):
        rng = np.random.default_rng(7)
        p = random_problem(rng, 8, density=1.0)
        minimum = p.energy(all_assignments(8)).min()
        sch = default_schedule(p, sweeps=2000)
        hits = sum(abs(anneal(p, sch, s).energy - minimum) < 1e-9 for s in range(100))
        assert hits >= 95

    def test_running_energy_matches_evaluate_after_sweeps(self):
        rng = np.random.default_rng(8)
        p = random_problem(rng, 15)
        x = rng.integers(0, 2, size=15).astype(np.uint8)
        best_x = np.empty_like(x)
        temps = Schedule(t_start=2.0, t_end=0.5, sweeps=40).temperatures()
        trace = np.empty(len(temps))
        best, final = _run_sweeps(
            *_kernel_inputs(p), temps, np.uint64(17), x, best_x, trace, False
        )
        assert final == pytest.approx(evaluate(p, x), abs=1e-9)
        assert best == pytest.approx(evaluate(p, best_x), abs=1e-9)

    def test_best_energy_trace_non_increasing(self):
        rng = np.random.default_rng(9)
        p = random_problem(rng, 12)
        x = np.empty(12, dtype=np.uint8)
        best_x = np.empty_like(x)
        temps = default_schedule(p, sweeps=500).temperatures()
        trace = np.empty(len(temps))
        _run_sweeps(*_kernel_inputs(p), temps, np.uint64(4), x, best_x, trace, True)
        assert np.all(np.diff(trace) <= 0)

    def test_ground_state_recovery_default_schedule(self):
        # small version of the acceptance criterion: default schedule, n <= 10
        rng = np.random.default_rng(10)
        for _ in range(3):
            n = int(rng.integers(5, 11))
            p = random_problem(rng, n, density=0.8)
            minimum = p.energy(all_assignments(n)).min()
            sch = default_schedule(p)
            hits = sum(abs(anneal(p, sch, s).energy - minimum) < 1e-9 for s in range(20))
            assert hits >= 18


class TestRunTrials:
    def test_single_trial_equals_anneal(self):
        rng = np.random.default_rng(11)
        p = random_problem(rng, 10)
        sch = default_schedule(p, sweeps=100)
        single = anneal(p, sch, seed=7)
        [trial] = run_trials(p, sch, n_trials=1, base_seed=7)
        assert np.array_equal(trial.assignment, single.assignment)
        assert trial.energy == single.energy

    def test_seed_contract(self):
        rng = np.random.default_rng(12)
        p = random_problem(rng, 8)
        sch = default_schedule(p, sweeps=50)
        results = run_trials(p, sch, n_trials=20, base_seed=100)
        assert [r.seed for r in results] == list(range(100, 120))

    def test_parallel_equals_sequential(self):
        rng = np.random.default_rng(13)
        p = random_problem(rng, 10)
        sch = default_schedule(p, sweeps=200)
        sequential = run_trials(p, sch, n_trials=12, base_seed=0, n_jobs=1)
        parallel = run_trials(p, sch, n_trials=12, base_seed=0, n_jobs=4)
        for a, b in zip(sequential, parallel):
            assert np.array_equal(a.assignment, b.assignment)
            assert a.energy == b.energy
            assert a.seed == b.seed

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            run_trials(QuboProblem(2), Schedule(1.0, 0.1, 10), 0, 0)
