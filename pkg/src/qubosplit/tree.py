"""Turn selector bits into splits and score them.

A splitting vector selects a subset of basic conditions; group 1 holds the
samples satisfying every selected condition (the logical product) and group 0
the rest. Predictions are the group means, so the mean squared error is the
proportion-weighted sum of group variances and the square-weighted variant
weights by squared proportions. Variances are population variances throughout,
which is what makes the quadratic-form expansion of the loss exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .binarize import BinaryDataset
from .qubo import split_ratio_bounds

__all__ = [
    "SplittingVector",
    "Split",
    "SplitMetrics",
    "extract_split",
    "metrics",
    "predict",
    "cmse_oracle",
    "brute_force_best",
    "remove_redundant",
    "swmse_mse_ratio",
    "split_report",
    "save_split_report",
]

_BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True, eq=False)
class SplittingVector:
    """Binary selection over basic conditions; the logical product defines the split."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", np.asarray(self.bits, dtype=np.uint8))
        if self.bits.ndim != 1:
            raise ValueError("bits must be a 1-D vector")
        if self.bits.size and self.bits.max() > 1:
            raise ValueError("bits must be 0/1")

    @staticmethod
    def from_indices(n_conditions: int, indices) -> "SplittingVector":
        bits = np.zeros(n_conditions, dtype=np.uint8)
        bits[list(indices)] = 1
        return SplittingVector(bits)

    @property
    def n_selected(self) -> int:
        return int(self.bits.sum())

    @property
    def selected_indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.bits)]

    def __eq__(self, other):
        if not isinstance(other, SplittingVector):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __len__(self):
        return self.bits.size

    def __repr__(self):
        return f"SplittingVector({self.selected_indices} of {len(self)})"


@dataclass
class Split:
    """A sample partition induced by a splitting vector, with group-mean predictions."""

    vector: SplittingVector
    s1_indices: np.ndarray
    s0_indices: np.ndarray
    pred1: float
    pred0: float

    @property
    def n_s1(self) -> int:
        return len(self.s1_indices)

    @property
    def n_s0(self) -> int:
        return len(self.s0_indices)

    @property
    def splittable(self) -> bool:
        return self.n_s1 > 0 and self.n_s0 > 0


@dataclass(frozen=True)
class SplitMetrics:
    mse: float
    swmse: float
    splittable: bool


def _product_mask(matrix: np.ndarray, selected) -> np.ndarray:
    """True where a sample satisfies every selected condition (vacuously all-True)."""
    selected = list(selected)
    if not selected:
        return np.ones(matrix.shape[0], dtype=bool)
    return (matrix[:, selected] != 0).all(axis=1)


def extract_split(vector: SplittingVector, data: BinaryDataset) -> Split:
    """Partition the samples by the logical product of the selected conditions.

    An empty group flags the split as non-splittable; the remaining group's
    prediction is then the global target mean and the empty group's is NaN.
    """
    if len(vector) != data.n_conditions:
        raise ValueError("vector length != number of conditions")
    selected = vector.selected_indices
    if not selected:
        raise ValueError("no condition selected")
    mask = _product_mask(data.matrix, selected)
    s1 = np.flatnonzero(mask)
    s0 = np.flatnonzero(~mask)
    t = data.targets
    pred1 = float(t[s1].mean()) if len(s1) else float("nan")
    pred0 = float(t[s0].mean()) if len(s0) else float("nan")
    return Split(vector=vector, s1_indices=s1, s0_indices=s0, pred1=pred1, pred0=pred0)


def _weighted_variances(t: np.ndarray, mask: np.ndarray) -> tuple[float, float]:
    """(mse, swmse) of a partition: variances weighted by share and share squared."""
    n = len(t)
    mse = 0.0
    swmse = 0.0
    for group in (t[mask], t[~mask]):
        if len(group) == 0:
            continue
        share = len(group) / n
        var = float(np.var(group))
        mse += var * share
        swmse += var * share * share
    return mse, swmse


def metrics(split: Split, data: BinaryDataset) -> SplitMetrics:
    mask = np.zeros(data.n_samples, dtype=bool)
    mask[split.s1_indices] = True
    mse, swmse = _weighted_variances(data.targets, mask)
    return SplitMetrics(mse=mse, swmse=swmse, splittable=split.splittable)


def predict(split: Split, matrix) -> np.ndarray:
    """Group-mean predictions for the rows of a binary matrix."""
    matrix = np.asarray(matrix)
    mask = _product_mask(matrix, split.vector.selected_indices)
    if not split.splittable:
        fallback = split.pred1 if split.n_s1 else split.pred0
        return np.full(matrix.shape[0], fallback)
    return np.where(mask, split.pred1, split.pred0)


def cmse_oracle(data: BinaryDataset) -> tuple[float, SplittingVector]:
    """Best MSE over all single-condition splits, ties broken by lowest index."""
    if data.n_conditions < 1:
        raise ValueError("dataset has no conditions")
    best_mse = np.inf
    best_vector = None
    for b in range(data.n_conditions):
        vector = SplittingVector.from_indices(data.n_conditions, [b])
        m = metrics(extract_split(vector, data), data)
        if m.mse < best_mse:
            best_mse = m.mse
            best_vector = vector
    return float(best_mse), best_vector


def brute_force_best(
    data: BinaryDataset, max_conditions: int, min_ratio: float = 0.0
) -> tuple[float, SplittingVector]:
    """Exhaustive minimum square-weighted MSE over vectors with 1..max_conditions bits.

    Vectors whose group-1 size falls outside the ratio bounds are skipped.
    Enumeration runs by ascending popcount then lexicographic index tuples, so
    ties resolve to the smallest such vector. Raises when nothing is admissible.
    """
    n_b = data.n_conditions
    if n_b > _BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {_BRUTE_FORCE_LIMIT} conditions, got {n_b}")
    if not 1 <= max_conditions <= n_b:
        raise ValueError("max_conditions must lie in 1..n_conditions")
    lo, hi = split_ratio_bounds(data.n_samples, min_ratio)
    matrix = data.matrix
    t = data.targets
    best = np.inf
    best_combo = None
    for k in range(1, max_conditions + 1):
        for combo in combinations(range(n_b), k):
            mask = _product_mask(matrix, combo)
            n1 = int(mask.sum())
            if not lo <= n1 <= hi:
                continue
            _, swmse = _weighted_variances(t, mask)
            if swmse < best:
                best = swmse
                best_combo = combo
    if best_combo is None:
        raise ValueError("no splitting vector satisfies the ratio bounds")
    return float(best), SplittingVector.from_indices(n_b, best_combo)


def remove_redundant(vector: SplittingVector, data: BinaryDataset) -> SplittingVector:
    """Drop selected conditions whose removal leaves group 1 unchanged, to fixpoint.

    Conditions are scanned in ascending index order and the scan repeats until
    stable. The result induces exactly the input's group 1 but is not
    guaranteed to be of minimum cardinality.
    """
    selected = set(vector.selected_indices)
    target = _product_mask(data.matrix, selected)
    changed = True
    while changed:
        changed = False
        for b in sorted(selected):
            trial = selected - {b}
            if np.array_equal(_product_mask(data.matrix, trial), target):
                selected = trial
                changed = True
    return SplittingVector.from_indices(len(vector), sorted(selected))


def swmse_mse_ratio(rho: float, gamma: float) -> float:
    """(rho^2 + gamma^2 (1-rho)^2) / (rho + gamma^2 (1-rho)).

    ``rho`` is the group-1 share and ``gamma`` the group-0 / group-1 standard
    deviation ratio; the value relates the square-weighted loss to the MSE of
    the same split.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    if gamma < 0.0:
        raise ValueError("gamma must be non-negative")
    denominator = rho + gamma * gamma * (1.0 - rho)
    if denominator <= 0.0:
        raise ValueError("ratio undefined: denominator is not positive")
    return (rho * rho + gamma * gamma * (1.0 - rho) ** 2) / denominator


def split_report(
    split: Split,
    split_metrics: SplitMetrics,
    data: BinaryDataset,
    reduced: SplittingVector | None = None,
) -> dict:
    """JSON-ready description of a split: predicates, group sizes, predictions, losses."""
    def _clean(value):
        return None if np.isnan(value) else value

    report = {
        "selected_conditions": [
            {"index": b, "description": data.describe_condition(b)}
            for b in split.vector.selected_indices
        ],
        "n_s1": split.n_s1,
        "n_s0": split.n_s0,
        "pred1": _clean(split.pred1),
        "pred0": _clean(split.pred0),
        "splittable": split_metrics.splittable,
        "mse": split_metrics.mse,
        "swmse": split_metrics.swmse,
    }
    if reduced is not None:
        report["reduced_vector"] = [int(b) for b in reduced.bits]
        report["reduced_conditions"] = [
            {"index": b, "description": data.describe_condition(b)}
            for b in reduced.selected_indices
        ]
    return report


def save_split_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
