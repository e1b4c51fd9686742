"""Binarizing a small tabular dataset into basic conditions.

Continuous features turn into greater-than / less-or-equal threshold pairs at
quantile cuts; categorical features turn into one not-equal condition per
label (and columns with too many labels are dropped). The resulting 0/1
matrix is the only thing the QUBO formulation ever sees.
"""

import numpy as np

from qubosplit import Column, RawDataset, apply_conditions, derive_conditions

rng = np.random.default_rng(0)
n = 12

area = np.round(rng.uniform(40, 160, size=n), 1)
age = np.round(rng.uniform(0, 50, size=n), 1)
zone = rng.choice(["a", "b", "c"], size=n)
price = np.round(2.0 * area - 0.8 * age + 30 * (zone == "a"), 1)

raw = RawDataset(
    columns=[
        Column("area", "continuous", area),
        Column("age", "continuous", age),
        Column("zone", "categorical", zone.astype(object)),
    ],
    targets=price,
)

print(f"raw dataset: {raw.n_samples} samples, {raw.n_features} features")
print("area:", area)
print("zone:", zone)

conditions = derive_conditions(raw, q=3)
print(f"\nq=3 gives thresholds at the 1/3 and 2/3 quantiles -> {len(conditions)} conditions:")
for j, cond in enumerate(conditions):
    print(f"  b{j}: {cond.describe(raw.feature_names)}")

dataset = apply_conditions(raw, conditions)
print("\nindicator matrix (rows = samples, columns = conditions):")
print(dataset.matrix)

# threshold pairs at the same cut are complements of each other
gt, le = dataset.matrix[:, 0], dataset.matrix[:, 1]
print("\ncomplementarity of the first gt/le pair:", np.all(gt + le == 1))

# a logical product of two conditions is just a row-wise AND of columns
product = dataset.matrix[:, 0] & dataset.matrix[:, 5]
print(f"samples satisfying '{dataset.describe_condition(0)}' AND "
      f"'{dataset.describe_condition(5)}': {np.flatnonzero(product).tolist()}")
