"""Build and evaluate the QUBO for the single-split search.

The Hamiltonian couples three groups of binary variables:

* selector bits, one per basic condition, choosing the logical product;
* per-sample miss-count bits, a one-hot register counting how many selected
  conditions the sample fails (register position 0 therefore indicates group-1
  membership);
* slack bits encoding two integer inequalities as quadratic penalties: the
  total number of selected conditions (1..max_conditions) and, optionally, the
  group-1 size (within [min_ratio, 1-min_ratio] of the sample count).

The loss is the square-weighted MSE written as a quadratic form over the
miss-count-zero bits; it equals ``n_samples**2`` times the proportion-squared
weighted sum of group variances whenever the constraint bits are consistent.
All pieces are rational in the targets, so penalties built from integer
coefficients stay integer-valued.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuboProblem",
    "PenaltyWeights",
    "VariableLayout",
    "FeasibilityReport",
    "ising_to_qubo",
    "square_of_linear",
    "encode_inequality",
    "split_ratio_bounds",
    "build_split_qubo",
    "split_qubo_components",
    "default_weights",
    "evaluate",
    "feasibility",
    "encode_split_assignment",
    "write_qubo_text",
    "read_qubo_text",
]

_RATIO_EPS = 1e-9  # guards ceil/floor against float noise like 0.2*20 = 4.000000000000001


class QuboProblem:
    """Upper-triangular quadratic coefficients, linear terms, and a constant offset."""

    def __init__(self, n_vars: int, linear=None, quadratic=None, offset: float = 0.0):
        self.n_vars = int(n_vars)
        self.linear = (
            np.zeros(self.n_vars) if linear is None else np.asarray(linear, dtype=np.float64).copy()
        )
        if self.linear.shape != (self.n_vars,):
            raise ValueError("linear vector length must equal n_vars")
        self.quadratic: dict[tuple[int, int], float] = {}
        if quadratic:
            for (i, j), v in quadratic.items():
                if not 0 <= i < j < self.n_vars:
                    raise ValueError(f"quadratic key ({i}, {j}) not strictly upper-triangular")
                if v != 0.0:
                    self.quadratic[(i, j)] = float(v)
        self.offset = float(offset)
        self._coo_cache = None
        self._csr_cache = None

    def _coo(self):
        if self._coo_cache is None:
            if self.quadratic:
                keys = np.array(sorted(self.quadratic), dtype=np.int64)
                vals = np.array([self.quadratic[(i, j)] for i, j in keys], dtype=np.float64)
                self._coo_cache = (keys[:, 0], keys[:, 1], vals)
            else:
                empty = np.empty(0, dtype=np.int64)
                self._coo_cache = (empty, empty, np.empty(0))
        return self._coo_cache

    def energy(self, x) -> float | np.ndarray:
        """Energy of one assignment (1-D) or a batch of assignments (rows of a 2-D array)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n_vars:
            raise ValueError(f"assignment length {x.shape[-1]} != n_vars {self.n_vars}")
        rows, cols, vals = self._coo()
        e = self.offset + x @ self.linear
        if vals.size:
            e = e + (x[..., rows] * x[..., cols]) @ vals
        return float(e) if x.ndim == 1 else e

    def symmetric_csr(self):
        """Neighbour lists with both (i, j) and (j, i) entries, for incremental flip gains.

        Cached; the problem must not be mutated after the first call.
        """
        if self._csr_cache is None:
            degree = np.zeros(self.n_vars + 1, dtype=np.int64)
            for i, j in self.quadratic:
                degree[i + 1] += 1
                degree[j + 1] += 1
            indptr = np.cumsum(degree)
            indices = np.zeros(indptr[-1], dtype=np.int64)
            values = np.zeros(indptr[-1], dtype=np.float64)
            fill = indptr[:-1].copy()
            for (i, j), v in self.quadratic.items():
                indices[fill[i]] = j
                values[fill[i]] = v
                fill[i] += 1
                indices[fill[j]] = i
                values[fill[j]] = v
                fill[j] += 1
            self._csr_cache = (indptr, indices, values)
        return self._csr_cache

    @property
    def n_terms(self) -> int:
        return int(np.count_nonzero(self.linear)) + len(self.quadratic)

    def __add__(self, other: "QuboProblem") -> "QuboProblem":
        if self.n_vars != other.n_vars:
            raise ValueError("can only add problems over the same variable space")
        quad = dict(self.quadratic)
        for k, v in other.quadratic.items():
            quad[k] = quad.get(k, 0.0) + v
        return QuboProblem(
            self.n_vars,
            linear=self.linear + other.linear,
            quadratic=quad,
            offset=self.offset + other.offset,
        )

    def __repr__(self):
        return (
            f"QuboProblem(n_vars={self.n_vars}, n_quadratic={len(self.quadratic)}, "
            f"offset={self.offset:g})"
        )


def evaluate(problem: QuboProblem, x) -> float:
    """offset + sum(linear_i x_i) + sum_{i<j}(quadratic_ij x_i x_j)."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("evaluate expects a single assignment vector")
    return float(problem.energy(x))


class _Accumulator:
    """Mutable coefficient store used while assembling a problem."""

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.linear = np.zeros(n_vars)
        self.quadratic: dict[tuple[int, int], float] = {}
        self.offset = 0.0

    def add_square(self, indices, coefs, constant: float = 0.0, weight: float = 1.0):
        """Add weight * (sum(coefs_k * x[indices_k]) + constant)**2; indices must be distinct."""
        idx = [int(i) for i, c in zip(indices, coefs) if c != 0.0]
        cfs = [float(c) for c in coefs if c != 0.0]
        self.offset += weight * constant * constant
        quad = self.quadratic
        for a, (i, ci) in enumerate(zip(idx, cfs)):
            self.linear[i] += weight * (ci * ci + 2.0 * constant * ci)
            for j, cj in zip(idx[a + 1 :], cfs[a + 1 :]):
                key = (i, j) if i < j else (j, i)
                quad[key] = quad.get(key, 0.0) + weight * 2.0 * ci * cj

    def to_problem(self) -> QuboProblem:
        return QuboProblem(self.n_vars, self.linear, self.quadratic, self.offset)


def square_of_linear(n_vars: int, indices, coefs, constant: float = 0.0) -> QuboProblem:
    """The quadratic expansion of (sum(coefs * x[indices]) + constant)**2."""
    acc = _Accumulator(n_vars)
    acc.add_square(indices, coefs, constant)
    return acc.to_problem()


def ising_to_qubo(couplings: dict, fields) -> QuboProblem:
    """Rewrite -sum(J_ij s_i s_j) - sum(h_i s_i) over spins s = 2x - 1 as a QUBO.

    Energies agree exactly for every assignment, constant offset included.
    """
    fields = np.asarray(fields, dtype=np.float64)
    n = fields.shape[0]
    linear = -2.0 * fields
    offset = float(fields.sum())
    quadratic: dict[tuple[int, int], float] = {}
    for (i, j), v in couplings.items():
        if not 0 <= i < j < n:
            raise ValueError(f"coupling key ({i}, {j}) must satisfy 0 <= i < j < {n}")
        v = float(v)
        quadratic[(i, j)] = quadratic.get((i, j), 0.0) - 4.0 * v
        linear[i] += 2.0 * v
        linear[j] += 2.0 * v
        offset -= v
    return QuboProblem(n, linear, quadratic, offset)


def encode_inequality(a_coeffs, alpha: int, beta: int) -> QuboProblem:
    """Quadratic penalty for alpha <= sum(a_coeffs * x) <= beta via one-hot slack bits.

    One fresh slack variable per integer j in [alpha, beta] is appended after
    the existing variables. The penalty is zero exactly when the slack register
    one-hot selects the value of the weighted sum and that value lies in range;
    for the equality case alpha == beta the one-hot term is dropped.
    """
    if beta < alpha:
        raise ValueError("beta must be >= alpha")
    a_coeffs = np.asarray(a_coeffs, dtype=np.float64)
    n_main = a_coeffs.shape[0]
    slack_values = list(range(int(alpha), int(beta) + 1))
    n = n_main + len(slack_values)
    acc = _Accumulator(n)
    indices = list(range(n_main)) + list(range(n_main, n))
    coefs = list(a_coeffs) + [-float(j) for j in slack_values]
    acc.add_square(indices, coefs)
    if alpha != beta:
        acc.add_square(range(n_main, n), [1.0] * len(slack_values), constant=-1.0)
    return acc.to_problem()


def split_ratio_bounds(n_samples: int, min_ratio: float) -> tuple[int, int]:
    """Inclusive integer bounds [ceil(a*n), floor((1-a)*n)] on the group-1 size."""
    if not 0.0 <= min_ratio < 0.5:
        raise ValueError("min_ratio must lie in [0, 0.5)")
    lo = math.ceil(min_ratio * n_samples - _RATIO_EPS)
    hi = math.floor((1.0 - min_ratio) * n_samples + _RATIO_EPS)
    return lo, hi


@dataclass(frozen=True)
class PenaltyWeights:
    """Relative weights of the loss and the two per-sample constraint penalties."""

    loss: float = 1.0
    link: float = 1.0
    onehot: float = 1.0

    def __post_init__(self):
        if min(self.loss, self.link, self.onehot) <= 0:
            raise ValueError("penalty weights must be strictly positive")


def default_weights(targets: np.ndarray) -> PenaltyWeights:
    """Loss weight 1; constraint weights 2*n*max(1, max t^2) so violations never pay off."""
    n = len(targets)
    w = 2.0 * n * max(1.0, float(np.max(targets**2))) if n else 1.0
    return PenaltyWeights(loss=1.0, link=w, onehot=w)


@dataclass(frozen=True)
class VariableLayout:
    """Flat index map for (selector, miss-count, slack) variable roles.

    Order: ``n_select`` selector bits; then per sample a miss-count register of
    ``max_conditions + 1`` bits (position 0 flags group-1 membership); then
    ``max_conditions`` count-slack bits for values 1..max_conditions; then one
    size-slack bit per admissible group-1 size when ``min_ratio`` is set.
    """

    n_select: int
    n_samples: int
    max_conditions: int
    min_ratio: float | None = None

    def __post_init__(self):
        if self.max_conditions < 1:
            raise ValueError("max_conditions must be >= 1")
        if self.min_ratio is not None:
            lo, hi = split_ratio_bounds(self.n_samples, self.min_ratio)
            if lo > hi:
                raise ValueError("min_ratio leaves no admissible group size")

    @property
    def register_width(self) -> int:
        return self.max_conditions + 1

    @property
    def size_slack_bounds(self) -> tuple[int, int] | None:
        if self.min_ratio is None:
            return None
        return split_ratio_bounds(self.n_samples, self.min_ratio)

    @property
    def n_size_slack(self) -> int:
        bounds = self.size_slack_bounds
        return 0 if bounds is None else bounds[1] - bounds[0] + 1

    @property
    def n_vars(self) -> int:
        return (
            self.n_select
            + self.n_samples * self.register_width
            + self.max_conditions
            + self.n_size_slack
        )

    def select_index(self, b: int) -> int:
        return b

    @property
    def select_slice(self) -> slice:
        return slice(0, self.n_select)

    def miss_index(self, sample: int, count: int) -> int:
        return self.n_select + sample * self.register_width + count

    def miss_slice(self, sample: int) -> slice:
        start = self.n_select + sample * self.register_width
        return slice(start, start + self.register_width)

    def group1_index(self, sample: int) -> int:
        return self.miss_index(sample, 0)

    def count_slack_index(self, value: int) -> int:
        if not 1 <= value <= self.max_conditions:
            raise IndexError(f"count slack value {value} outside 1..{self.max_conditions}")
        return self.n_select + self.n_samples * self.register_width + (value - 1)

    def size_slack_index(self, value: int) -> int:
        bounds = self.size_slack_bounds
        if bounds is None or not bounds[0] <= value <= bounds[1]:
            raise IndexError(f"size slack value {value} outside bounds {bounds}")
        base = self.n_select + self.n_samples * self.register_width + self.max_conditions
        return base + (value - bounds[0])

    def miss_block(self, x: np.ndarray) -> np.ndarray:
        """The miss-count registers of an assignment as an (n_samples, width) view."""
        start = self.n_select
        stop = start + self.n_samples * self.register_width
        return np.asarray(x)[start:stop].reshape(self.n_samples, self.register_width)

    def to_dict(self) -> dict:
        bounds = self.size_slack_bounds
        d = {
            "n_vars": self.n_vars,
            "n_select": self.n_select,
            "n_samples": self.n_samples,
            "max_conditions": self.max_conditions,
            "min_ratio": self.min_ratio,
            "select": [0, self.n_select],
            "miss_registers": {
                "start": self.n_select,
                "rows": self.n_samples,
                "width": self.register_width,
                "order": "sample-major",
            },
            "count_slack": {
                str(j): self.count_slack_index(j) for j in range(1, self.max_conditions + 1)
            },
        }
        if bounds is None:
            d["size_slack"] = {}
        else:
            d["size_slack"] = {
                str(j): self.size_slack_index(j) for j in range(bounds[0], bounds[1] + 1)
            }
        return d

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint satisfaction checked directly on an assignment, not via penalties.

    ``link_violations`` counts samples whose miss-count register disagrees with
    the number of selected conditions they fail; ``onehot_violations`` counts
    registers that are not one-hot; ``count_ok`` is the 1..max_conditions bound
    on the number of selected conditions; ``size_ok`` is the group-1 size bound
    (vacuously true without a ratio constraint).
    """

    link_violations: int
    onehot_violations: int
    count_ok: bool
    size_ok: bool
    selected_count: int

    @property
    def fully_feasible(self) -> bool:
        return (
            self.link_violations == 0
            and self.onehot_violations == 0
            and self.count_ok
            and self.size_ok
        )

    def to_dict(self) -> dict:
        return {
            "link_violations": self.link_violations,
            "onehot_violations": self.onehot_violations,
            "count_ok": self.count_ok,
            "size_ok": self.size_ok,
            "selected_count": self.selected_count,
        }


def split_qubo_components(
    data,
    max_conditions: int,
    min_ratio: float | None = None,
    weights: PenaltyWeights | None = None,
    standardize: bool = True,
):
    """The split Hamiltonian as separately evaluable, already-weighted parts.

    Returns ``(components, layout)`` where components maps ``loss``, ``link``,
    ``onehot``, ``count`` and (when a ratio bound is set) ``size`` to problems
    over the full variable space; their sum is the problem built by
    :func:`build_split_qubo`.
    """
    matrix = np.asarray(data.matrix, dtype=np.float64)
    n_samples, n_select = matrix.shape
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    if not 1 <= max_conditions <= n_select:
        raise ValueError("max_conditions must lie in 1..n_conditions")
    t = np.asarray(data.targets, dtype=np.float64)
    if standardize:
        t = t - t.mean()
    if weights is None:
        weights = default_weights(t)
    layout = VariableLayout(
        n_select=n_select,
        n_samples=n_samples,
        max_conditions=max_conditions,
        min_ratio=min_ratio,
    )
    n = layout.n_vars
    width = layout.register_width
    group1 = np.array([layout.group1_index(s) for s in range(n_samples)])

    # loss: (sum u t^2)(sum u) - (sum u t)^2 + same for the complement group,
    # expanded so the diagonal cancels and only 2*(t_s - t_r)^2 pair couplings remain
    loss = _Accumulator(n)
    w_loss = weights.loss / n_samples
    t1, t2 = float(t.sum()), float((t * t).sum())
    loss.offset += w_loss * (t2 * n_samples - t1 * t1)
    loss.linear[group1] += w_loss * (-t2 - n_samples * t * t + 2.0 * t1 * t)
    for s in range(n_samples):
        for r in range(s + 1, n_samples):
            c = w_loss * 2.0 * (t[s] - t[r]) ** 2
            if c != 0.0:
                key = (group1[s], group1[r])
                loss.quadratic[key] = loss.quadratic.get(key, 0.0) + c

    # link: per sample, (number of failed selected conditions - register value)^2
    link = _Accumulator(n)
    w_link = weights.link / n_samples
    for s in range(n_samples):
        failed = np.flatnonzero(matrix[s] == 0)
        idx = list(failed) + [layout.miss_index(s, c) for c in range(1, width)]
        coefs = [1.0] * len(failed) + [-float(c) for c in range(1, width)]
        link.add_square(idx, coefs, weight=w_link)

    # onehot: each register selects exactly one count
    onehot = _Accumulator(n)
    w_onehot = weights.onehot / n_samples
    for s in range(n_samples):
        idx = [layout.miss_index(s, c) for c in range(width)]
        onehot.add_square(idx, [1.0] * width, constant=-1.0, weight=w_onehot)

    # count: 1 <= number of selected conditions <= max_conditions
    count = _Accumulator(n)
    _add_inequality(
        count,
        list(range(n_select)),
        [1.0] * n_select,
        1,
        max_conditions,
        layout.count_slack_index,
    )

    components = {
        "loss": loss.to_problem(),
        "link": link.to_problem(),
        "onehot": onehot.to_problem(),
        "count": count.to_problem(),
    }

    if min_ratio is not None:
        size = _Accumulator(n)
        lo, hi = layout.size_slack_bounds
        _add_inequality(
            size,
            list(group1),
            [1.0] * n_samples,
            lo,
            hi,
            layout.size_slack_index,
        )
        components["size"] = size.to_problem()

    return components, layout


def _add_inequality(acc: _Accumulator, indices, coefs, alpha: int, beta: int, slack_index):
    """Slack-encoded inequality penalty written at explicit slack positions."""
    slack_values = list(range(alpha, beta + 1))
    slack_idx = [slack_index(j) for j in slack_values]
    acc.add_square(
        list(indices) + slack_idx,
        list(coefs) + [-float(j) for j in slack_values],
    )
    if alpha != beta:
        acc.add_square(slack_idx, [1.0] * len(slack_idx), constant=-1.0)


def build_split_qubo(
    data,
    max_conditions: int,
    min_ratio: float | None = None,
    weights: PenaltyWeights | None = None,
    standardize: bool = True,
) -> tuple[QuboProblem, VariableLayout]:
    """Assemble the full split-search QUBO over (selector, miss-count, slack) bits."""
    components, layout = split_qubo_components(
        data, max_conditions, min_ratio=min_ratio, weights=weights, standardize=standardize
    )
    problem = components["loss"]
    for name in ("link", "onehot", "count", "size"):
        if name in components:
            problem = problem + components[name]
    return problem, layout


def feasibility(layout: VariableLayout, data, x) -> FeasibilityReport:
    """Check the constraints of an assignment directly against the dataset."""
    x = np.asarray(x)
    if x.shape != (layout.n_vars,):
        raise ValueError(f"assignment length {x.shape} != n_vars {layout.n_vars}")
    matrix = np.asarray(data.matrix, dtype=np.int64)
    selectors = x[layout.select_slice].astype(np.int64)
    failed_counts = (1 - matrix) @ selectors
    block = layout.miss_block(x).astype(np.int64)
    register_values = block @ np.arange(layout.register_width)
    link_violations = int(np.count_nonzero(failed_counts != register_values))
    onehot_violations = int(np.count_nonzero(block.sum(axis=1) != 1))
    selected = int(selectors.sum())
    count_ok = 1 <= selected <= layout.max_conditions
    bounds = layout.size_slack_bounds
    if bounds is None:
        size_ok = True
    else:
        group1_size = int(block[:, 0].sum())
        size_ok = bounds[0] <= group1_size <= bounds[1]
    return FeasibilityReport(
        link_violations=link_violations,
        onehot_violations=onehot_violations,
        count_ok=count_ok,
        size_ok=size_ok,
        selected_count=selected,
    )


def encode_split_assignment(layout: VariableLayout, data, selector_bits) -> np.ndarray | None:
    """The honest fully-feasible assignment for given selector bits, or None.

    Registers are set one-hot at each sample's true failed-condition count and
    slacks at their matching values. Returns None when no fully feasible
    completion exists (a count exceeds the register width, the selected-count
    bound fails, or the group size falls outside the ratio bounds).
    """
    selector_bits = np.asarray(selector_bits, dtype=np.int64)
    if selector_bits.shape != (layout.n_select,):
        raise ValueError("selector bits length mismatch")
    selected = int(selector_bits.sum())
    if not 1 <= selected <= layout.max_conditions:
        return None
    matrix = np.asarray(data.matrix, dtype=np.int64)
    failed_counts = (1 - matrix) @ selector_bits
    if failed_counts.max() > layout.max_conditions:
        return None
    group1_size = int(np.count_nonzero(failed_counts == 0))
    bounds = layout.size_slack_bounds
    if bounds is not None and not bounds[0] <= group1_size <= bounds[1]:
        return None
    x = np.zeros(layout.n_vars, dtype=np.uint8)
    x[layout.select_slice] = selector_bits.astype(np.uint8)
    for s, c in enumerate(failed_counts):
        x[layout.miss_index(s, int(c))] = 1
    x[layout.count_slack_index(selected)] = 1
    if bounds is not None:
        x[layout.size_slack_index(group1_size)] = 1
    return x


def write_qubo_text(problem: QuboProblem, path) -> None:
    """Plain-text export: `p qubo <n_vars> <n_terms>`, `c offset <value>`, `i j coeff` lines."""
    with open(path, "w") as fh:
        fh.write(f"p qubo {problem.n_vars} {problem.n_terms}\n")
        fh.write(f"c offset {float(problem.offset)!r}\n")
        for i in np.flatnonzero(problem.linear):
            fh.write(f"{i} {i} {float(problem.linear[i])!r}\n")
        for (i, j) in sorted(problem.quadratic):
            fh.write(f"{i} {j} {float(problem.quadratic[(i, j)])!r}\n")


def read_qubo_text(path) -> QuboProblem:
    n_vars = None
    offset = 0.0
    linear = None
    quadratic: dict[tuple[int, int], float] = {}
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "c":
                if len(parts) >= 3 and parts[1] == "offset":
                    offset = float(parts[2])
                continue
            if parts[0] == "p":
                if len(parts) < 4 or parts[1] != "qubo":
                    raise ValueError(f"{path}: malformed problem line {line.strip()!r}")
                n_vars = int(parts[2])
                linear = np.zeros(n_vars)
                continue
            if n_vars is None:
                raise ValueError(f"{path}: term line before 'p qubo' header")
            i, j, coeff = int(parts[0]), int(parts[1]), float(parts[2])
            if i == j:
                linear[i] += coeff
            else:
                key = (i, j) if i < j else (j, i)
                quadratic[key] = quadratic.get(key, 0.0) + coeff
    if n_vars is None:
        raise ValueError(f"{path}: missing 'p qubo' header")
    return QuboProblem(n_vars, linear, quadratic, offset)
