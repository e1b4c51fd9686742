"""Multi-trial Metropolis simulated annealing over a QUBO.

A sweep proposes one single-bit flip per variable in shuffled order and
accepts with probability min(1, exp(-gain/T)). Flip gains come from cached
local fields updated incrementally from the sparse quadratic rows, never by
re-evaluating the full energy. All randomness derives from a splitmix64
counter inside the jitted kernel (portable integer arithmetic), so a trial is
a pure function of (problem, schedule, seed).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .qubo import FeasibilityReport, QuboProblem, evaluate

__all__ = ["Schedule", "TrialResult", "default_schedule", "sweep", "anneal", "run_trials"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_BIT = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@dataclass(frozen=True)
class Schedule:
    """Geometric temperature decay from t_start to t_end over full sweeps."""

    t_start: float
    t_end: float
    sweeps: int = 10000
    kind: str = "geometric"

    def __post_init__(self):
        if not self.t_start >= self.t_end > 0:
            raise ValueError("need t_start >= t_end > 0")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.kind != "geometric":
            raise ValueError(f"unsupported schedule kind {self.kind!r}")

    def temperatures(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.t_start])
        ratio = (self.t_end / self.t_start) ** (1.0 / (self.sweeps - 1))
        return self.t_start * ratio ** np.arange(self.sweeps, dtype=np.float64)


def default_schedule(problem: QuboProblem, sweeps: int = 10000) -> Schedule:
    """t_start = max(1, max |linear coefficient|), t_end a factor 1e-3 below."""
    t_start = 1.0
    if problem.linear.size:
        t_start = max(1.0, float(np.max(np.abs(problem.linear))))
    return Schedule(t_start=t_start, t_end=1e-3 * t_start, sweeps=sweeps)


@dataclass
class TrialResult:
    """Best assignment seen in one annealing trial.

    ``feasibility`` stays None for bare QUBO problems; the experiment harness
    fills it in when a variable layout is available.
    """

    assignment: np.ndarray
    energy: float
    seed: int
    feasibility: FeasibilityReport | None = None


@njit(inline="always")
def _mix_next(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return state, z


@njit(cache=True, nogil=True)
def _run_sweeps(indptr, indices, values, linear, offset, temps, seed, x, best_x, trace, init_random):
    n = x.shape[0]
    state = seed
    if init_random:
        for i in range(n):
            state, z = _mix_next(state)
            x[i] = np.uint8(z & _BIT)
    fields = linear.copy()
    for i in range(n):
        if x[i] == 1:
            for k in range(indptr[i], indptr[i + 1]):
                fields[indices[k]] += values[k]
    energy = offset
    for i in range(n):
        if x[i] == 1:
            energy += linear[i]
            for k in range(indptr[i], indptr[i + 1]):
                j = indices[k]
                if j > i and x[j] == 1:
                    energy += values[k]
    best = energy
    for i in range(n):
        best_x[i] = x[i]
    order = np.empty(n, dtype=np.int64)
    for sweep_idx in range(temps.shape[0]):
        temp = temps[sweep_idx]
        for i in range(n):
            order[i] = i
        for i in range(n - 1, 0, -1):
            state, z = _mix_next(state)
            j = int(z % np.uint64(i + 1))
            order[i], order[j] = order[j], order[i]
        for k in range(n):
            i = order[k]
            gain = fields[i] if x[i] == 0 else -fields[i]
            accept = gain <= 0.0
            if not accept:
                state, z = _mix_next(state)
                u = (z >> _S11) * _INV53
                accept = u < math.exp(-gain / temp)
            if accept:
                if x[i] == 0:
                    x[i] = 1
                    delta = 1.0
                else:
                    x[i] = 0
                    delta = -1.0
                for kk in range(indptr[i], indptr[i + 1]):
                    fields[indices[kk]] += values[kk] * delta
                energy += gain
                if energy < best:
                    best = energy
                    for q in range(n):
                        best_x[q] = x[q]
        trace[sweep_idx] = best
    return best, energy


def _kernel_inputs(problem: QuboProblem):
    indptr, indices, values = problem.symmetric_csr()
    return indptr, indices, values, problem.linear, problem.offset


def sweep(problem: QuboProblem, state, temperature: float, rng) -> np.ndarray:
    """One Metropolis pass over all variables; returns the updated state copy."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    x = np.array(state, dtype=np.uint8)
    if x.shape != (problem.n_vars,):
        raise ValueError("state length != n_vars")
    seed = np.uint64(rng.integers(0, 2**64, dtype=np.uint64))
    best_x = np.empty_like(x)
    trace = np.empty(1)
    _run_sweeps(
        *_kernel_inputs(problem),
        np.array([float(temperature)]),
        seed,
        x,
        best_x,
        trace,
        False,
    )
    return x


def anneal(problem: QuboProblem, schedule: Schedule, seed: int) -> TrialResult:
    """One seeded trial: random start, geometric cooling, best-visited state returned."""
    x = np.empty(problem.n_vars, dtype=np.uint8)
    best_x = np.empty_like(x)
    trace = np.empty(schedule.sweeps)
    _run_sweeps(
        *_kernel_inputs(problem),
        schedule.temperatures(),
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
        x,
        best_x,
        trace,
        True,
    )
    return TrialResult(assignment=best_x, energy=evaluate(problem, best_x), seed=int(seed))


def run_trials(
    problem: QuboProblem,
    schedule: Schedule,
    n_trials: int,
    base_seed: int,
    n_jobs: int = 1,
) -> list[TrialResult]:
    """Independent trials with seeds base_seed..base_seed+n_trials-1, in trial order.

    The problem is shared read-only; with ``n_jobs > 1`` trials run on a thread
    pool (the kernel releases the GIL) and the result list is identical to
    sequential execution.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    seeds = [base_seed + k for k in range(n_trials)]
    if n_jobs == 1:
        return [anneal(problem, schedule, s) for s in seeds]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(lambda s: anneal(problem, schedule, s), seeds))
