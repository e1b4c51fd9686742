"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Budgets are generous wall-clock caps; the statistical thresholds are
lower bounds chosen to hold deterministically for the pinned seeds.
"""

import itertools
import time

import numpy as np
import pytest

from helpers import all_assignments, noisy_interaction_dataset, random_binary_dataset

from qubosplit import (
    BasicCondition,
    BinaryDataset,
    ExperimentConfig,
    QuboProblem,
    SplittingVector,
    SyntheticSpec,
    anneal,
    brute_force_best,
    build_split_qubo,
    default_schedule,
    encode_inequality,
    encode_split_assignment,
    extract_split,
    feasibility,
    generate_synthetic,
    metrics,
    run_ablation_experiment,
    run_real_experiment,
    run_synthetic_experiment,
    run_trials,
    swmse_mse_ratio,
)
from qubosplit.qubo import split_qubo_components


def report(number: int, ok: bool, detail: str) -> None:
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {number} failed: {detail}"


def test_criterion_1_penalty_correctness():
    """Slack-encoded inequality penalties vanish exactly on honest encodings."""
    start = time.perf_counter()
    rng = np.random.default_rng(20260801)
    checked = 0
    for _ in range(100):
        n_main = int(rng.integers(1, 6))
        coefs = rng.choice([-2, -1, 1, 2, 3], size=n_main).astype(float)
        lo_sum = int(coefs[coefs < 0].sum())
        hi_sum = int(coefs[coefs > 0].sum())
        max_slack = 12 - n_main
        while True:
            alpha = int(rng.integers(lo_sum - 1, hi_sum + 1))
            beta = int(rng.integers(alpha + 1, hi_sum + 2))
            if beta - alpha + 1 <= max_slack:
                break
        pen = encode_inequality(coefs, alpha, beta)
        assert pen.n_vars <= 12
        assignments = all_assignments(pen.n_vars)
        energies = pen.energy(assignments)
        sums = assignments[:, :n_main] @ coefs
        slack = assignments[:, n_main:]
        one_hot = slack.sum(axis=1) == 1
        slack_value = slack @ (alpha + np.arange(beta - alpha + 1))
        expected_zero = one_hot & (sums >= alpha) & (sums <= beta) & (slack_value == sums)
        is_zero = np.abs(energies) < 1e-12
        assert np.array_equal(is_zero, expected_zero)
        assert np.all(energies[~is_zero] >= 1.0 - 1e-9)  # integer coefficients
        checked += len(assignments)
    elapsed = time.perf_counter() - start
    report(1, elapsed < 10.0, f"100 instances, {checked} assignments, {elapsed:.1f}s")


def test_criterion_2_hamiltonian_swmse_equivalence():
    """QUBO energy minus penalties equals loss_weight * n_samples * SWMSE."""
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    instances = 0
    assignments_checked = 0
    while instances < 50:
        n_s = int(rng.integers(4, 11))
        n_b = int(rng.integers(2, 7))
        m = int(rng.integers(1, 4))
        m = min(m, n_b)
        data = random_binary_dataset(rng, n_s, n_b)
        min_ratio = [None, 0.0, 0.2][instances % 3]
        components, layout = split_qubo_components(data, m, min_ratio=min_ratio)
        total = sum(components.values(), start=QuboProblem(layout.n_vars))
        for bits_tuple in itertools.product([0, 1], repeat=n_b):
            bits = np.array(bits_tuple, dtype=np.uint8)
            x = encode_split_assignment(layout, data, bits)
            if x is None:
                continue
            assert feasibility(layout, data, x).fully_feasible
            swmse = metrics(extract_split(SplittingVector(bits), data), data).swmse
            expected = 1.0 * n_s * swmse
            penalties = sum(components[k].energy(x) for k in components if k != "loss")
            got = total.energy(x) - penalties
            assert got == pytest.approx(expected, rel=1e-9, abs=1e-12)
            assignments_checked += 1
        instances += 1
    elapsed = time.perf_counter() - start
    report(2, elapsed < 30.0, f"50 instances, {assignments_checked} feasible assignments, {elapsed:.1f}s")


def test_criterion_3_ground_state_recovery():
    """Default schedule reaches the exhaustive minimum in >= 90% of seeds."""
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 100
    for _ in range(20):
        n = int(rng.integers(4, 11))
        quad = {
            (i, j): float(rng.normal())
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.8
        }
        problem = QuboProblem(n, linear=rng.normal(size=n), quadratic=quad)
        minimum = problem.energy(all_assignments(n)).min()
        schedule = default_schedule(problem)
        hits = sum(abs(anneal(problem, schedule, s).energy - minimum) < 1e-9 for s in range(100))
        worst = min(worst, hits)
        assert hits >= 90
    elapsed = time.perf_counter() - start
    report(3, elapsed < 60.0, f"20 instances, worst recovery {worst}/100 seeds, {elapsed:.1f}s")


def _synthetic_hits(n_conditions: int, k: int, m: int) -> int:
    config = ExperimentConfig(
        mode="synthetic",
        synthetic=SyntheticSpec(n_samples=20, n_conditions=n_conditions, k=k, seed=0),
        max_conditions=m,
        n_trials=1000,
        n_repeats=1,
        base_seed=0,
    )
    summary = run_synthetic_experiment(config)
    return summary.repeats[0].n_optimal_hits


def test_criterion_4_synthetic_optimal_split_discovery():
    """1000 trials find the planted single condition, harder with more conditions."""
    start = time.perf_counter()
    hits_small = _synthetic_hits(n_conditions=10, k=1, m=1)
    hits_large = _synthetic_hits(n_conditions=100, k=1, m=1)
    elapsed = time.perf_counter() - start
    ok = hits_small >= 10 and hits_large < hits_small and elapsed < 300.0
    report(4, ok, f"hits: n_b=10 -> {hits_small}/1000, n_b=100 -> {hits_large}/1000, {elapsed:.0f}s")


def test_criterion_5_logical_product_discovery():
    """1000 trials find the planted two-condition product."""
    start = time.perf_counter()
    hits = _synthetic_hits(n_conditions=10, k=2, m=2)
    elapsed = time.perf_counter() - start
    ok = hits >= 5 and elapsed < 300.0
    report(5, ok, f"planted pair found in {hits}/1000 trials, {elapsed:.0f}s")


def test_criterion_6_oracle_dominance():
    """Best feasible trial matches the brute-force optimum on most instances."""
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    matched = 0
    for instance in range(10):
        n_b = int(rng.integers(6, 13))
        data = random_binary_dataset(rng, 10, n_b)
        problem, layout = build_split_qubo(data, 3)
        trials = run_trials(problem, default_schedule(problem), 200, base_seed=instance * 1000)
        best = np.inf
        for trial in trials:
            if not feasibility(layout, data, trial.assignment).fully_feasible:
                continue
            bits = trial.assignment[layout.select_slice]
            best = min(best, metrics(extract_split(SplittingVector(bits), data), data).swmse)
        oracle, _ = brute_force_best(data, 3, min_ratio=0.0)
        if abs(best - oracle) <= 1e-9 * max(1.0, abs(oracle)):
            matched += 1
    elapsed = time.perf_counter() - start
    ok = matched >= 8 and elapsed < 120.0
    report(6, ok, f"annealer matched brute force on {matched}/10 instances, {elapsed:.0f}s")


def test_criterion_7_real_mode_pipeline():
    """Count chain holds and a planted interaction beats the single-condition baseline."""
    start = time.perf_counter()
    data = noisy_interaction_dataset(n_samples=20, n_conditions=10, k=2, seed=0, noise=0.15)
    config = ExperimentConfig(
        mode="real",
        max_conditions=10,
        min_ratio=0.2,
        n_trials=1000,
        n_repeats=1,
        base_seed=0,
    )
    summary = run_real_experiment(config, data)
    rep = summary.repeats[0]
    chain = rep.n_superior <= rep.n_matched <= rep.n_splittable <= 1000
    elapsed = time.perf_counter() - start
    ok = chain and rep.n_superior >= 1
    report(
        7,
        ok,
        f"n_splittable={rep.n_splittable} >= n_matched={rep.n_matched} >= n_superior={rep.n_superior}, cmse={rep.cmse:.3f}, {elapsed:.0f}s",
    )


def test_criterion_8_splitting_constraint_ablation():
    """Both ablation arms run; feasible constrained trials keep 4 <= |S1| <= 16."""
    start = time.perf_counter()
    data = noisy_interaction_dataset(n_samples=20, n_conditions=10, k=2, seed=0, noise=0.15)
    config = ExperimentConfig(
        mode="ablation",
        max_conditions=8,
        min_ratio=0.2,
        n_trials=300,
        n_repeats=1,
        base_seed=0,
    )
    results = run_ablation_experiment(config, data)
    both_rows = set(results) == {"without", "with"} and all(
        "n_superior" in res.aggregate for res in results.values()
    )
    lo, hi = 4, 16  # 0.2*20 and 0.8*20
    bounds_ok = True
    feasible_seen = 0
    for rec in results["with"].repeats[0].trials:
        feasible = (
            rec.link_violations == 0
            and rec.onehot_violations == 0
            and rec.count_ok
            and rec.size_ok
        )
        if feasible:
            feasible_seen += 1
            if not lo <= rec.n_s1 <= hi:
                bounds_ok = False
    elapsed = time.perf_counter() - start
    wo, w = results["without"].repeats[0], results["with"].repeats[0]
    ok = both_rows and bounds_ok and feasible_seen > 0
    report(
        8,
        ok,
        f"n_superior without={wo.n_superior} with={w.n_superior}; {feasible_seen} feasible constrained trials "
        f"all within [{lo},{hi}], {elapsed:.0f}s",
    )


def test_criterion_9_discussion_formulas():
    """Closed-form loss ratio: exact value, narrowing envelope, equal-variance identity."""
    exact = swmse_mse_ratio(0.5, 1.0) == 0.5

    gammas = np.linspace(0.5, 2.0, 121)[1:-1]
    rho_grid = np.linspace(0.0025, 0.9975, 399)
    envelopes = []
    for a in (0.0, 0.1, 0.2, 0.3, 0.4):
        rhos = rho_grid[(rho_grid >= a) & (rho_grid <= 1 - a)]
        values = [swmse_mse_ratio(r, g) for r in rhos for g in gammas]
        envelopes.append((min(values), max(values)))
    non_widening = all(
        nxt[0] >= prv[0] - 1e-12 and nxt[1] <= prv[1] + 1e-12
        for prv, nxt in zip(envelopes, envelopes[1:])
    )

    identity = True
    for n1, base in ((2, [0.0, 2.0]), (3, [1.0, 3.0, 5.0]), (5, [0.0, 1.0, 2.0, 3.0, 4.0])):
        group1 = np.asarray(base)
        group0 = np.asarray(base) + 10.0  # same variance, shifted mean
        for extra in range(0, 3):
            g0 = np.concatenate([group0] + [group0] * extra)
            # replication preserves the population variance
            t = np.concatenate([group1, g0])
            col = np.concatenate([np.ones(len(group1)), np.zeros(len(g0))]).astype(np.uint8)
            data = BinaryDataset(
                matrix=col[:, None],
                conditions=[BasicCondition.greater_than(0, 0.5)],
                targets=t,
            )
            split = extract_split(SplittingVector.from_indices(1, [0]), data)
            m = metrics(split, data)
            rho = split.n_s1 / data.n_samples
            want = (2 * (rho - 0.5) ** 2 + 0.5) * m.mse
            if not np.isclose(m.swmse, want, rtol=1e-9, atol=1e-12):
                identity = False
    ok = exact and non_widening and identity
    report(
        9,
        ok,
        f"ratio(0.5,1)=0.5 {exact}; envelope non-widening {non_widening}; "
        f"equal-variance identity {identity}",
    )


def test_criterion_10_generator_statistics():
    """Planted generator hits mean target 0.5 within 0.01 at 100k samples."""
    start = time.perf_counter()
    means = {}
    for k in (1, 2, 3):
        data = generate_synthetic(SyntheticSpec(n_samples=100_000, n_conditions=k + 1, k=k, seed=k))
        means[k] = float(data.targets.mean())
    elapsed = time.perf_counter() - start
    ok = all(abs(m - 0.5) <= 0.01 for m in means.values()) and elapsed < 10.0
    detail = ", ".join(f"k={k}: {m:.4f}" for k, m in means.items())
    report(10, ok, f"{detail}, {elapsed:.1f}s")
