"""Single-split regression trees trained by QUBO annealing.

Raw tabular features are binarized into basic conditions; selecting a subset
of conditions (a logical product) splits the samples in two, and the split
search is posed as a quadratic binary optimization solved by multi-trial
Metropolis simulated annealing. See the demos/ directory for narrative
walkthroughs of each capability.
"""

from .anneal import Schedule, TrialResult, anneal, default_schedule, run_trials, sweep
from .binarize import (
    BasicCondition,
    BinaryDataset,
    Column,
    RawDataset,
    apply_conditions,
    binarize_dataset,
    derive_conditions,
    derive_conditions_from_fractions,
    load_binary_dataset,
    load_raw_csv,
    save_binary_dataset,
)
from .data import (
    SyntheticSpec,
    generate_synthetic,
    load_real,
    load_schema,
    planted_vector,
    subsample,
)
from .experiments import (
    ExperimentConfig,
    ExperimentSummary,
    RepeatResult,
    TrialRecord,
    export_ablation_report,
    export_report,
    import_summary,
    run_ablation_experiment,
    run_real_experiment,
    run_synthetic_experiment,
)
from .qubo import (
    FeasibilityReport,
    PenaltyWeights,
    QuboProblem,
    VariableLayout,
    build_split_qubo,
    default_weights,
    encode_inequality,
    encode_split_assignment,
    evaluate,
    feasibility,
    ising_to_qubo,
    read_qubo_text,
    split_qubo_components,
    split_ratio_bounds,
    square_of_linear,
    write_qubo_text,
)
from .tree import (
    Split,
    SplitMetrics,
    SplittingVector,
    brute_force_best,
    cmse_oracle,
    extract_split,
    metrics,
    predict,
    remove_redundant,
    save_split_report,
    split_report,
    swmse_mse_ratio,
)

__version__ = "0.1.0"
