"""Experiment harness: repeated multi-trial runs with machine-readable summaries.

Synthetic mode counts, per repeat, the trials whose redundancy-reduced selector
vector equals the planted optimum. Real mode recomputes the single-condition
baseline (best MSE over one-condition splits) on each repeat's subsample and
classifies every trial: splittable, at least as good as the baseline, strictly
better. Both classifications require a splittable trial, which makes the count
chain n_superior <= n_matched <= n_splittable structural.

Seeding is fully deterministic: repeat r draws its dataset (or subsample) from
``base_seed + r`` and its trials from ``base_seed + r * n_trials + k``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .anneal import Schedule, default_schedule, run_trials
from .binarize import BinaryDataset
from .data import SyntheticSpec, generate_synthetic, load_real, planted_vector, subsample
from .qubo import PenaltyWeights, build_split_qubo, feasibility
from .tree import SplittingVector, cmse_oracle, extract_split, metrics, remove_redundant

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "RepeatResult",
    "ExperimentSummary",
    "run_synthetic_experiment",
    "run_real_experiment",
    "run_ablation_experiment",
    "export_report",
    "export_ablation_report",
    "import_summary",
]

MODES = ("synthetic", "real", "oracle", "ablation")


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one experiment end to end."""

    mode: str = "synthetic"
    synthetic: SyntheticSpec | None = None
    csv_path: str | None = None
    schema_path: str | None = None
    q_fractions: tuple = (0.33, 0.66)
    max_categories: int = 3
    subsample_n: int | None = None
    max_conditions: int = 1
    min_ratio: float | None = None
    weights: PenaltyWeights | None = None
    schedule: Schedule | None = None
    sweeps: int = 10000  # used when schedule is derived per problem
    n_trials: int = 100
    n_repeats: int | None = None  # mode default: 5 synthetic, 10 real/ablation, 1 oracle
    base_seed: int = 0
    n_jobs: int = 1
    plot_x: str = "max_conditions"
    output: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if self.n_repeats is None:
            self.n_repeats = {"synthetic": 5, "real": 10, "ablation": 10, "oracle": 1}[self.mode]
        if self.n_repeats < 1:
            raise ValueError("n_repeats must be >= 1")
        if self.plot_x not in ("max_conditions", "n_conditions", "n_samples"):
            raise ValueError("plot_x must be max_conditions, n_conditions or n_samples")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["q_fractions"] = [float(f) for f in self.q_fractions]
        return d


@dataclass
class TrialRecord:
    """Per-trial evaluation: energy, direct constraint checks, split quality."""

    trial_index: int
    seed: int
    energy: float
    link_violations: int
    onehot_violations: int
    count_ok: bool
    size_ok: bool
    selected_count: int
    splittable: bool
    n_s1: int
    mse: float
    swmse: float
    conditions_pre: int
    conditions_post: int
    optimal_hit: bool | None = None


@dataclass
class RepeatResult:
    index: int
    dataset_seed: int
    n_splittable: int
    cmse: float | None = None
    n_optimal_hits: int | None = None
    n_matched: int | None = None
    n_superior: int | None = None
    trials: list[TrialRecord] = field(default_factory=list)


@dataclass
class ExperimentSummary:
    mode: str
    config: dict
    n_conditions: int
    repeats: list[RepeatResult]
    aggregate: dict

    def to_dict(self) -> dict:
        return asdict(self)


def _mean_std(values) -> dict:
    values = np.asarray(values, dtype=np.float64)
    ddof = 1 if len(values) >= 2 else 0
    return {"mean": float(values.mean()), "std": float(values.std(ddof=ddof))}


def _aggregate(repeats: list[RepeatResult]) -> dict:
    agg = {"n_splittable": _mean_std([r.n_splittable for r in repeats])}
    for key in ("n_optimal_hits", "n_matched", "n_superior"):
        values = [getattr(r, key) for r in repeats]
        if all(v is not None for v in values):
            agg[key] = _mean_std(values)
    return agg


def _evaluate_trial(trial, layout, data: BinaryDataset, planted: SplittingVector | None):
    """Extract, score and (optionally) match one trial against the planted vector."""
    report = feasibility(layout, data, trial.assignment)
    trial.feasibility = report
    bits = np.asarray(trial.assignment[layout.select_slice], dtype=np.uint8)
    if bits.sum() == 0:
        # vacuous selection: every sample lands in group 1, estimator degenerates
        # to the global mean
        var = float(np.var(data.targets))
        splittable, n_s1 = False, data.n_samples
        mse = swmse = var
        pre = post = 0
        hit = False if planted is not None else None
    else:
        vector = SplittingVector(bits)
        split = extract_split(vector, data)
        m = metrics(split, data)
        reduced = remove_redundant(vector, data)
        splittable, n_s1 = m.splittable, split.n_s1
        mse, swmse = m.mse, m.swmse
        pre, post = vector.n_selected, reduced.n_selected
        hit = (reduced == planted) if planted is not None else None
    return TrialRecord(
        trial_index=0,
        seed=trial.seed,
        energy=float(trial.energy),
        link_violations=report.link_violations,
        onehot_violations=report.onehot_violations,
        count_ok=report.count_ok,
        size_ok=report.size_ok,
        selected_count=report.selected_count,
        splittable=bool(splittable),
        n_s1=int(n_s1),
        mse=float(mse),
        swmse=float(swmse),
        conditions_pre=int(pre),
        conditions_post=int(post),
        optimal_hit=hit,
    )


def _run_repeat(config: ExperimentConfig, data: BinaryDataset, repeat: int, planted):
    problem, layout = build_split_qubo(
        data,
        config.max_conditions,
        min_ratio=config.min_ratio,
        weights=config.weights,
    )
    schedule = config.schedule or default_schedule(problem, sweeps=config.sweeps)
    trials = run_trials(
        problem,
        schedule,
        config.n_trials,
        base_seed=config.base_seed + repeat * config.n_trials,
        n_jobs=config.n_jobs,
    )
    records = []
    for k, trial in enumerate(trials):
        record = _evaluate_trial(trial, layout, data, planted)
        record.trial_index = k
        records.append(record)
    return records


def run_synthetic_experiment(config: ExperimentConfig) -> ExperimentSummary:
    """Repeated planted-optimum recovery counts (mean and std across repeats)."""
    if config.synthetic is None:
        raise ValueError("synthetic mode needs a SyntheticSpec")
    repeats = []
    for r in range(config.n_repeats):
        spec = replace(config.synthetic, seed=config.base_seed + r)
        data = generate_synthetic(spec)
        planted = planted_vector(spec)
        records = _run_repeat(config, data, r, planted)
        repeats.append(
            RepeatResult(
                index=r,
                dataset_seed=spec.seed,
                n_splittable=sum(rec.splittable for rec in records),
                n_optimal_hits=sum(bool(rec.optimal_hit) for rec in records),
                trials=records,
            )
        )
    return ExperimentSummary(
        mode="synthetic",
        config=config.to_dict(),
        n_conditions=config.synthetic.n_conditions,
        repeats=repeats,
        aggregate=_aggregate(repeats),
    )


def _load_base_dataset(config: ExperimentConfig) -> BinaryDataset:
    if config.csv_path is not None:
        if config.schema_path is None:
            raise ValueError("real mode with a CSV needs a schema path")
        return load_real(
            config.csv_path,
            config.schema_path,
            q_fractions=config.q_fractions,
            max_categories=config.max_categories,
        )
    if config.synthetic is not None:
        return generate_synthetic(replace(config.synthetic, seed=config.base_seed))
    raise ValueError("real mode needs a CSV path or a synthetic stand-in spec")


def run_real_experiment(
    config: ExperimentConfig, data: BinaryDataset | None = None
) -> ExperimentSummary:
    """Trials classified against the per-subsample single-condition baseline.

    ``n_matched`` counts splittable trials with MSE at most the baseline, ``n_superior``
    those strictly better; both are bounded by ``n_splittable``, the splittable count.
    """
    base = data if data is not None else _load_base_dataset(config)
    repeats = []
    for r in range(config.n_repeats):
        seed = config.base_seed + r
        if config.subsample_n is not None and config.subsample_n < base.n_samples:
            sample = subsample(base, config.subsample_n, seed=seed)
        else:
            sample = base
        cmse, _ = cmse_oracle(sample)
        records = _run_repeat(config, sample, r, planted=None)
        n_splittable = sum(rec.splittable for rec in records)
        n_matched = sum(rec.splittable and rec.mse <= cmse for rec in records)
        n_superior = sum(rec.splittable and rec.mse < cmse for rec in records)
        repeats.append(
            RepeatResult(
                index=r,
                dataset_seed=seed,
                n_splittable=n_splittable,
                cmse=float(cmse),
                n_matched=n_matched,
                n_superior=n_superior,
                trials=records,
            )
        )
    return ExperimentSummary(
        mode="real",
        config=config.to_dict(),
        n_conditions=base.n_conditions,
        repeats=repeats,
        aggregate=_aggregate(repeats),
    )


def run_ablation_experiment(
    config: ExperimentConfig, data: BinaryDataset | None = None
) -> dict[str, ExperimentSummary]:
    """Both arms of the group-size-constraint ablation on identical seeds and data."""
    if config.min_ratio is None:
        raise ValueError("ablation needs min_ratio set for the constrained arm")
    base = data if data is not None else _load_base_dataset(config)
    without = run_real_experiment(replace(config, min_ratio=None), base)
    without.mode = "ablation:without"
    with_constraint = run_real_experiment(config, base)
    with_constraint.mode = "ablation:with"
    return {"without": without, "with": with_constraint}


def _plot_value(summary: ExperimentSummary):
    key = summary.config.get("plot_x", "max_conditions")
    if key == "n_conditions":
        return key, summary.n_conditions
    if key == "n_samples":
        synthetic = summary.config.get("synthetic")
        if synthetic:
            return key, synthetic["n_samples"]
        return key, summary.config.get("subsample_n")
    return key, summary.config.get("max_conditions")


def export_report(summary: ExperimentSummary, out_dir) -> dict[str, Path]:
    """Write summary JSON, a flat per-trial CSV, a plot-ready row, and an MSE histogram CSV."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "summary": out_dir / "summary.json",
        "trials": out_dir / "trials.csv",
        "plot": out_dir / "plot.csv",
        "histogram": out_dir / "histogram.csv",
    }
    with open(paths["summary"], "w") as fh:
        json.dump(summary.to_dict(), fh, indent=2)

    trial_fields = [f for f in TrialRecord.__dataclass_fields__]
    with open(paths["trials"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["repeat"] + trial_fields)
        for rep in summary.repeats:
            for rec in rep.trials:
                writer.writerow([rep.index] + [getattr(rec, f) for f in trial_fields])

    x_name, x_value = _plot_value(summary)
    with open(paths["plot"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_name", "x", "metric", "mean", "std"])
        for metric_name, stats in summary.aggregate.items():
            writer.writerow([x_name, x_value, metric_name, stats["mean"], stats["std"]])

    with open(paths["histogram"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["repeat", "trial_index", "mse", "cmse"])
        for rep in summary.repeats:
            marker = "" if rep.cmse is None else rep.cmse
            for rec in rep.trials:
                writer.writerow([rep.index, rec.trial_index, rec.mse, marker])
    return paths


def export_ablation_report(results: dict[str, ExperimentSummary], out_dir) -> dict[str, Path]:
    """Per-arm reports plus a two-row comparison table."""
    out_dir = Path(out_dir)
    paths = {}
    for arm, summary in results.items():
        paths[arm] = export_report(summary, out_dir / arm)
    table = out_dir / "ablation.csv"
    with open(table, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "arm",
                "n_superior_mean",
                "n_superior_std",
                "n_matched_mean",
                "n_matched_std",
                "n_splittable_mean",
                "n_splittable_std",
            ]
        )
        for arm in ("without", "with"):
            agg = results[arm].aggregate
            writer.writerow(
                [arm]
                + [agg["n_superior"]["mean"], agg["n_superior"]["std"]]
                + [agg["n_matched"]["mean"], agg["n_matched"]["std"]]
                + [agg["n_splittable"]["mean"], agg["n_splittable"]["std"]]
            )
    paths["table"] = table
    return paths


def import_summary(path) -> ExperimentSummary:
    """Reconstruct a summary written by :func:`export_report` (round-trip equal)."""
    with open(path) as fh:
        raw = json.load(fh)
    repeats = [
        RepeatResult(
            index=rep["index"],
            dataset_seed=rep["dataset_seed"],
            n_splittable=rep["n_splittable"],
            cmse=rep["cmse"],
            n_optimal_hits=rep["n_optimal_hits"],
            n_matched=rep["n_matched"],
            n_superior=rep["n_superior"],
            trials=[TrialRecord(**t) for t in rep["trials"]],
        )
        for rep in raw["repeats"]
    ]
    return ExperimentSummary(
        mode=raw["mode"],
        config=raw["config"],
        n_conditions=raw["n_conditions"],
        repeats=repeats,
        aggregate=raw["aggregate"],
    )
