"""Shared test utilities: exhaustive enumeration and independent energy oracles."""

import numpy as np

from qubosplit import BasicCondition, BinaryDataset


def all_assignments(n: int) -> np.ndarray:
    """All 2^n binary assignments as rows, variable i in column i."""
    return ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.float64)


def energy_by_double_loop(problem, x) -> float:
    """Independent brute-force evaluation: offset + linear + explicit i<j loop."""
    e = problem.offset
    for i in range(problem.n_vars):
        e += problem.linear[i] * x[i]
    for i in range(problem.n_vars):
        for j in range(i + 1, problem.n_vars):
            e += problem.quadratic.get((i, j), 0.0) * x[i] * x[j]
    return e


def random_binary_dataset(rng, n_samples: int, n_conditions: int, binary_targets=False):
    matrix = rng.integers(0, 2, size=(n_samples, n_conditions)).astype(np.uint8)
    if binary_targets:
        targets = rng.integers(0, 2, size=n_samples).astype(np.float64)
    else:
        targets = rng.normal(size=n_samples)
    conditions = [BasicCondition.greater_than(j, 0.5) for j in range(n_conditions)]
    return BinaryDataset(matrix=matrix, conditions=conditions, targets=targets)


def noisy_interaction_dataset(n_samples=20, n_conditions=12, k=2, seed=0, noise=0.25):
    """Planted k-condition interaction with additive Gaussian target noise."""
    from qubosplit import SyntheticSpec, generate_synthetic

    ds = generate_synthetic(SyntheticSpec(n_samples, n_conditions, k, seed=seed))
    rng = np.random.default_rng(seed + 10_000)
    targets = ds.targets + noise * rng.normal(size=n_samples)
    return BinaryDataset(
        matrix=ds.matrix,
        conditions=ds.conditions,
        targets=targets,
        feature_names=ds.feature_names,
        meta=ds.meta,
    )
