"""Dataset generation and ingestion.

Synthetic data draws one uniform number per (sample, condition) cell, sample
by sample over conditions 0..n_conditions-1, and thresholds it: the first
``k`` columns use threshold ``1 - 0.5**(1/k)`` so each is set with probability
``0.5**(1/k)``, the rest use 0.5. The target is the columnwise product of the
first k columns, hence exactly half the samples are positive in expectation
and the first k selectors form the planted optimum.

Real data comes in as CSV plus a schema tagging columns continuous or
categorical; thresholds sit at explicit quantile fractions (default 0.33 and
0.66) and categorical columns with too many labels are dropped. Binarization
runs on the full table; experiment subsamples are drawn afterwards, seeded and
without replacement.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .binarize import (
    BasicCondition,
    BinaryDataset,
    apply_conditions,
    derive_conditions_from_fractions,
    load_raw_csv,
)
from .tree import SplittingVector

__all__ = [
    "SyntheticSpec",
    "generate_synthetic",
    "planted_vector",
    "subsample",
    "load_schema",
    "load_real",
]


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the planted-product generator: sizes, interaction order, seed."""

    n_samples: int
    n_conditions: int
    k: int
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if not 1 <= self.k <= self.n_conditions:
            raise ValueError("k must lie in 1..n_conditions")


def generate_synthetic(spec: SyntheticSpec) -> BinaryDataset:
    """Planted logical-product dataset; deterministic for a given spec.

    Uniform draws come from a single PCG64 stream in fixed row-major order, so
    identical specs give bit-identical datasets on any platform.
    """
    rng = np.random.default_rng(spec.seed)
    thresholds = np.full(spec.n_conditions, 0.5)
    thresholds[: spec.k] = 1.0 - 0.5 ** (1.0 / spec.k)
    u = rng.random((spec.n_samples, spec.n_conditions))
    matrix = (u > thresholds).astype(np.uint8)
    targets = matrix[:, : spec.k].all(axis=1).astype(np.float64)
    conditions = [
        BasicCondition.greater_than(b, float(thresholds[b])) for b in range(spec.n_conditions)
    ]
    return BinaryDataset(
        matrix=matrix,
        conditions=conditions,
        targets=targets,
        feature_names=[f"u{b}" for b in range(spec.n_conditions)],
        meta={"seed": spec.seed, "k": spec.k, "generator": "pcg64"},
    )


def planted_vector(spec: SyntheticSpec) -> SplittingVector:
    """The optimal splitting vector of a generated dataset: the first k selectors."""
    return SplittingVector.from_indices(spec.n_conditions, range(spec.k))


def subsample(data: BinaryDataset, n_samples: int, seed: int = 0) -> BinaryDataset:
    """Seeded row subset without replacement, rows kept in original order."""
    if not 1 <= n_samples <= data.n_samples:
        raise ValueError("n_samples must lie in 1..data.n_samples")
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(data.n_samples, size=n_samples, replace=False))
    meta = dict(data.meta)
    meta.update({"subsample_seed": seed, "parent_n_samples": data.n_samples})
    return BinaryDataset(
        matrix=data.matrix[rows],
        conditions=list(data.conditions),
        targets=data.targets[rows],
        feature_names=data.feature_names,
        meta=meta,
    )


def load_schema(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def load_real(
    csv_path,
    schema,
    q_fractions=(0.33, 0.66),
    max_categories: int = 3,
    n_samples: int | None = None,
    seed: int = 0,
) -> BinaryDataset:
    """CSV + schema -> binary dataset via quantile thresholds and label dropping."""
    if not isinstance(schema, dict):
        schema = load_schema(schema)
    raw = load_raw_csv(csv_path, schema)
    conditions = derive_conditions_from_fractions(raw, q_fractions, max_categories)
    data = apply_conditions(raw, conditions)
    data.meta.update(
        {
            "source": str(csv_path),
            "q_fractions": [float(f) for f in q_fractions],
            "max_categories": max_categories,
            "n_conditions": data.n_conditions,
        }
    )
    if n_samples is not None and n_samples < data.n_samples:
        data = subsample(data, n_samples, seed)
    return data
