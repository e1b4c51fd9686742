"""A real-data-style run: baseline, trial classification, and the size-constraint ablation.

The stand-in dataset plants a two-condition interaction and adds target noise,
so no single condition explains the target. Each repeat draws a subsample,
recomputes the best single-condition MSE (the conventional-split baseline) on
it, and classifies every trial: splittable (n_splittable), at least as good as the
baseline (n_matched), strictly better (n_superior). The ablation reruns the same seeds
with the group-size constraint removed.
"""

import numpy as np

from qubosplit import (
    BasicCondition,
    BinaryDataset,
    ExperimentConfig,
    SyntheticSpec,
    cmse_oracle,
    brute_force_best,
    generate_synthetic,
    run_ablation_experiment,
)

base = generate_synthetic(SyntheticSpec(n_samples=40, n_conditions=10, k=2, seed=0))
rng = np.random.default_rng(1)
data = BinaryDataset(
    matrix=base.matrix,
    conditions=base.conditions,
    targets=base.targets + 0.15 * rng.normal(size=base.n_samples),
    feature_names=base.feature_names,
)

cmse, cvec = cmse_oracle(data)
best_swmse, best_vec = brute_force_best(data, max_conditions=2, min_ratio=0.2)
print(f"single-condition baseline mse {cmse:.4f} via condition {cvec.selected_indices}")
print(f"best two-condition split has swmse {best_swmse:.4f} via {best_vec.selected_indices}")

config = ExperimentConfig(
    mode="ablation",
    max_conditions=5,
    min_ratio=0.2,
    subsample_n=20,
    n_trials=150,
    n_repeats=2,
    base_seed=0,
)
results = run_ablation_experiment(config, data)

print("\narm        repeat  n_splittable  n_matched  n_superior  baseline")
for arm in ("without", "with"):
    for rep in results[arm].repeats:
        print(f"{arm:<10} {rep.index:>6} {rep.n_splittable:>5} {rep.n_matched:>5} {rep.n_superior:>5}  {rep.cmse:.4f}")

print("\naggregate (mean +/- std over repeats):")
for arm in ("without", "with"):
    agg = results[arm].aggregate
    print(f"  {arm:<8} n_superior {agg['n_superior']['mean']:.1f} +/- {agg['n_superior']['std']:.1f}, "
          f"n_splittable {agg['n_splittable']['mean']:.1f} +/- {agg['n_splittable']['std']:.1f}")
