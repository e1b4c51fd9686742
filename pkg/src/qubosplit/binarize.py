"""Binarize raw tabular features into basic conditions.

A basic condition is a single-feature binary predicate: a threshold test on a
continuous feature (``x > c`` or ``x <= c``) or a category-inequality test on a
categorical feature (``x != label``). Evaluating every condition on every
sample produces the 0/1 indicator matrix that the QUBO formulation works on.
Splits are logical products of selected conditions, so category inequalities
let a product express a logical sum over the remaining labels.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"

GREATER_THAN = "gt"
LESS_EQUAL = "le"
NOT_EQUAL = "ne"

# strings treated as a missing value when parsing CSV cells
MISSING_TOKENS = {"", "na", "nan", "null", "none"}


@dataclass
class Column:
    """One raw feature column: float values (NaN = missing) or object labels (None = missing)."""

    name: str
    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, CATEGORICAL):
            raise ValueError(f"unknown column kind {self.kind!r}")
        if self.kind == CONTINUOUS:
            self.values = np.asarray(self.values, dtype=np.float64)
        else:
            self.values = np.asarray(self.values, dtype=object)


@dataclass
class RawDataset:
    """Raw tabular dataset: named feature columns plus a real-valued target vector."""

    columns: list[Column]
    targets: np.ndarray

    def __post_init__(self):
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.targets.ndim != 1:
            raise ValueError("targets must be a 1-D vector")
        if self.n_samples < 2:
            raise ValueError("dataset needs at least 2 samples")
        if not np.all(np.isfinite(self.targets)):
            raise ValueError("targets must not contain missing values")
        for col in self.columns:
            if len(col.values) != self.n_samples:
                raise ValueError(f"column {col.name!r} length != number of targets")

    @property
    def n_samples(self) -> int:
        return len(self.targets)

    @property
    def n_features(self) -> int:
        return len(self.columns)

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.columns]


@dataclass(frozen=True)
class BasicCondition:
    """A single-feature predicate generating one binary column.

    ``gt``/``le`` carry a threshold and apply to continuous features; ``ne``
    carries a category label and applies to categorical features. Missing
    feature values fail every condition.
    """

    feature_index: int
    kind: str
    threshold: float | None = None
    category: str | None = None

    @staticmethod
    def greater_than(feature_index: int, threshold: float) -> "BasicCondition":
        return BasicCondition(feature_index, GREATER_THAN, threshold=float(threshold))

    @staticmethod
    def less_equal(feature_index: int, threshold: float) -> "BasicCondition":
        return BasicCondition(feature_index, LESS_EQUAL, threshold=float(threshold))

    @staticmethod
    def not_equal(feature_index: int, category: str) -> "BasicCondition":
        return BasicCondition(feature_index, NOT_EQUAL, category=str(category))

    def evaluate(self, column: Column) -> np.ndarray:
        """Indicator vector of the condition on one column; missing values give 0."""
        if self.kind == GREATER_THAN:
            if column.kind != CONTINUOUS:
                raise ValueError("threshold condition on a non-continuous column")
            return (column.values > self.threshold).astype(np.uint8)
        if self.kind == LESS_EQUAL:
            if column.kind != CONTINUOUS:
                raise ValueError("threshold condition on a non-continuous column")
            return (column.values <= self.threshold).astype(np.uint8)
        if self.kind == NOT_EQUAL:
            if column.kind != CATEGORICAL:
                raise ValueError("category condition on a non-categorical column")
            present = np.array([v is not None for v in column.values], dtype=bool)
            differs = np.array([v != self.category for v in column.values], dtype=bool)
            return (present & differs).astype(np.uint8)
        raise ValueError(f"unknown condition kind {self.kind!r}")

    def describe(self, feature_names: list[str] | None = None) -> str:
        name = f"x{self.feature_index}"
        if feature_names is not None:
            name = feature_names[self.feature_index]
        if self.kind == GREATER_THAN:
            return f"{name} > {self.threshold:g}"
        if self.kind == LESS_EQUAL:
            return f"{name} <= {self.threshold:g}"
        return f"{name} != {self.category!r}"

    def to_dict(self) -> dict:
        d = {"feature_index": self.feature_index, "kind": self.kind}
        if self.threshold is not None:
            d["threshold"] = self.threshold
        if self.category is not None:
            d["category"] = self.category
        return d

    @staticmethod
    def from_dict(d: dict) -> "BasicCondition":
        return BasicCondition(
            feature_index=int(d["feature_index"]),
            kind=d["kind"],
            threshold=d.get("threshold"),
            category=d.get("category"),
        )


@dataclass
class BinaryDataset:
    """Indicator matrix (samples x conditions) with the generating conditions and targets."""

    matrix: np.ndarray
    conditions: list[BasicCondition]
    targets: np.ndarray
    feature_names: list[str] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.uint8)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if self.matrix.shape[0] != len(self.targets):
            raise ValueError("matrix rows != number of targets")
        if self.matrix.shape[1] != len(self.conditions):
            raise ValueError("matrix columns != number of conditions")
        if self.matrix.size and self.matrix.max() > 1:
            raise ValueError("matrix entries must be 0/1")

    @property
    def n_samples(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_conditions(self) -> int:
        return self.matrix.shape[1]

    def describe_condition(self, index: int) -> str:
        return self.conditions[index].describe(self.feature_names)


def quantile_thresholds(values: np.ndarray, fractions) -> np.ndarray:
    """Deduplicated empirical quantiles (linear interpolation) of the finite values."""
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return np.empty(0)
    return np.unique(np.quantile(finite, np.asarray(fractions, dtype=np.float64)))


def derive_conditions_from_fractions(
    raw: RawDataset, fractions, max_categories: int = 3
) -> list[BasicCondition]:
    """Basic conditions at explicit quantile fractions.

    Continuous columns get a greater-than and a less-or-equal condition per
    (deduplicated) threshold. Categorical columns with at most
    ``max_categories`` distinct labels get one not-equal condition per label;
    columns with more labels are dropped.
    """
    fractions = sorted(float(f) for f in fractions)
    if any(not 0.0 < f < 1.0 for f in fractions):
        raise ValueError("quantile fractions must lie strictly inside (0, 1)")
    conditions: list[BasicCondition] = []
    for idx, col in enumerate(raw.columns):
        if col.kind == CONTINUOUS:
            for c in quantile_thresholds(col.values, fractions):
                conditions.append(BasicCondition.greater_than(idx, c))
                conditions.append(BasicCondition.less_equal(idx, c))
        else:
            labels = sorted({v for v in col.values if v is not None})
            if len(labels) <= max_categories:
                for label in labels:
                    conditions.append(BasicCondition.not_equal(idx, label))
    return conditions


def derive_conditions(raw: RawDataset, q: int, max_categories: int = 3) -> list[BasicCondition]:
    """Basic conditions at the q-quantile grid k/q, k = 1..q-1."""
    if q < 2:
        raise ValueError("q must be at least 2")
    if q > raw.n_samples - 1:
        raise ValueError("q must be at most n_samples - 1")
    fractions = [k / q for k in range(1, q)]
    return derive_conditions_from_fractions(raw, fractions, max_categories)


def apply_conditions(raw: RawDataset, conditions: list[BasicCondition]) -> BinaryDataset:
    """Evaluate every condition on every sample into the 0/1 indicator matrix."""
    n_s = raw.n_samples
    matrix = np.zeros((n_s, len(conditions)), dtype=np.uint8)
    for j, cond in enumerate(conditions):
        if not 0 <= cond.feature_index < raw.n_features:
            raise ValueError(f"condition {j} references missing column {cond.feature_index}")
        matrix[:, j] = cond.evaluate(raw.columns[cond.feature_index])
    return BinaryDataset(
        matrix=matrix,
        conditions=list(conditions),
        targets=raw.targets.copy(),
        feature_names=raw.feature_names,
    )


def binarize_dataset(raw: RawDataset, q: int, max_categories: int = 3) -> BinaryDataset:
    return apply_conditions(raw, derive_conditions(raw, q, max_categories))


def _parse_continuous(cell: str) -> float:
    text = cell.strip()
    if text.lower() in MISSING_TOKENS:
        return np.nan
    return float(text)


def _parse_categorical(cell: str):
    text = cell.strip()
    if text.lower() in MISSING_TOKENS:
        return None
    return text


def load_raw_csv(csv_path, schema: dict) -> RawDataset:
    """Read a CSV with a header row under a schema tagging column kinds.

    Schema keys: ``target`` (required column name), ``columns`` (name -> kind
    map), ``default_kind`` (kind for unlisted columns, default continuous).
    """
    target_name = schema.get("target")
    if not target_name:
        raise ValueError("schema must name a target column")
    kinds = schema.get("columns", {})
    default_kind = schema.get("default_kind", CONTINUOUS)
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{csv_path}: empty file") from None
        rows = [row for row in reader if row]
    if target_name not in header:
        raise ValueError(f"target column {target_name!r} not in CSV header")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ValueError(f"{csv_path}: row {i + 1} has {len(row)} cells, expected {len(header)}")
    target_pos = header.index(target_name)
    columns = []
    raw_cells = list(zip(*rows)) if rows else [()] * len(header)
    targets = np.array([_parse_continuous(c) for c in raw_cells[target_pos]])
    for pos, name in enumerate(header):
        if pos == target_pos:
            continue
        kind = kinds.get(name, default_kind)
        cells = raw_cells[pos]
        if kind == CONTINUOUS:
            values = np.array([_parse_continuous(c) for c in cells], dtype=np.float64)
        else:
            values = np.array([_parse_categorical(c) for c in cells], dtype=object)
        columns.append(Column(name=name, kind=kind, values=values))
    return RawDataset(columns=columns, targets=targets)


def save_binary_dataset(data: BinaryDataset, csv_path, meta_path=None) -> None:
    """Write the 0/1 matrix (+ target column) as CSV and the condition list as JSON."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"b{j}" for j in range(data.n_conditions)] + ["target"])
        for i in range(data.n_samples):
            writer.writerow(list(map(int, data.matrix[i])) + [repr(float(data.targets[i]))])
    if meta_path is not None:
        meta = {
            "n_samples": data.n_samples,
            "n_conditions": data.n_conditions,
            "feature_names": data.feature_names,
            "conditions": [
                {**cond.to_dict(), "description": data.describe_condition(j)}
                for j, cond in enumerate(data.conditions)
            ],
        }
        meta.update(data.meta)
        with open(meta_path, "w") as fh:
            json.dump(meta, fh, indent=2)


def load_binary_dataset(csv_path, meta_path=None) -> BinaryDataset:
    """Read back a dataset written by :func:`save_binary_dataset`."""
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    if not header or header[-1] != "target":
        raise ValueError("binary dataset CSV must end with a 'target' column")
    matrix = np.array([[int(c) for c in row[:-1]] for row in rows], dtype=np.uint8)
    targets = np.array([float(row[-1]) for row in rows], dtype=np.float64)
    matrix = matrix.reshape(len(rows), len(header) - 1)
    conditions = [
        BasicCondition.greater_than(j, 0.5) for j in range(len(header) - 1)
    ]
    feature_names = None
    meta: dict = {}
    if meta_path is not None:
        with open(meta_path) as fh:
            loaded = json.load(fh)
        conditions = [BasicCondition.from_dict(d) for d in loaded.get("conditions", [])]
        feature_names = loaded.get("feature_names")
        meta = {
            k: v
            for k, v in loaded.items()
            if k not in ("conditions", "feature_names", "n_samples", "n_conditions")
        }
    return BinaryDataset(
        matrix=matrix,
        conditions=conditions,
        targets=targets,
        feature_names=feature_names,
        meta=meta,
    )
