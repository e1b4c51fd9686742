"""Command-line entry points wiring the library together.

Subcommands: ``binarize``, ``gen-synthetic``, ``build-qubo``, ``anneal``,
``oracle`` and ``experiment {synthetic,real,ablation}``. Experiment settings
can come from a TOML file (``--config``), with explicit flags taking
precedence. The exit code is nonzero only for configuration errors; an
experiment that finds nothing still exits 0.
"""

from __future__ import annotations

import argparse
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import binarize as binarize_mod
from . import data as data_mod
from . import experiments as exp_mod
from . import qubo as qubo_mod
from . import tree as tree_mod
from .anneal import Schedule, default_schedule, run_trials

CONFIG_ERRORS = (ValueError, KeyError, OSError, json.JSONDecodeError)


def _add_dataset_args(parser):
    parser.add_argument("--csv", help="binary dataset CSV (from binarize/gen-synthetic)")
    parser.add_argument("--meta", help="condition metadata JSON for --csv")
    parser.add_argument("--samples", type=int, help="synthetic: number of samples")
    parser.add_argument("--conditions", type=int, help="synthetic: number of conditions")
    parser.add_argument("--k", type=int, help="synthetic: planted interaction order")
    parser.add_argument("--seed", type=int, default=None)


def _load_dataset(args) -> binarize_mod.BinaryDataset:
    if args.csv:
        return binarize_mod.load_binary_dataset(args.csv, args.meta)
    if args.samples and args.conditions and args.k:
        spec = data_mod.SyntheticSpec(
            args.samples, args.conditions, args.k, seed=args.seed or 0
        )
        return data_mod.generate_synthetic(spec)
    raise ValueError("provide --csv or the synthetic trio --samples/--conditions/--k")


def _schedule_args(parser):
    parser.add_argument("--sweeps", type=int, default=None)
    parser.add_argument("--t-start", type=float, default=None)
    parser.add_argument("--t-end", type=float, default=None)


def _schedule_from_args(args, problem) -> Schedule:
    base = default_schedule(problem)
    return Schedule(
        t_start=args.t_start if args.t_start is not None else base.t_start,
        t_end=args.t_end if args.t_end is not None else base.t_end,
        sweeps=args.sweeps if args.sweeps is not None else base.sweeps,
    )


def _cmd_binarize(args) -> int:
    schema = data_mod.load_schema(args.schema)
    raw = binarize_mod.load_raw_csv(args.input, schema)
    if args.q is not None:
        conditions = binarize_mod.derive_conditions(raw, args.q, args.max_categories)
    else:
        fractions = [float(f) for f in args.fractions.split(",")]
        conditions = binarize_mod.derive_conditions_from_fractions(
            raw, fractions, args.max_categories
        )
    dataset = binarize_mod.apply_conditions(raw, conditions)
    binarize_mod.save_binary_dataset(dataset, args.out_csv, args.out_meta)
    print(f"wrote {dataset.n_samples} x {dataset.n_conditions} binary matrix to {args.out_csv}")
    return 0


def _cmd_gen_synthetic(args) -> int:
    spec = data_mod.SyntheticSpec(args.samples, args.conditions, args.k, seed=args.seed)
    dataset = data_mod.generate_synthetic(spec)
    binarize_mod.save_binary_dataset(dataset, args.out_csv, args.out_meta)
    print(f"wrote {dataset.n_samples} x {dataset.n_conditions} synthetic dataset to {args.out_csv}")
    return 0


def _cmd_build_qubo(args) -> int:
    dataset = _load_dataset(args)
    weights = None
    if args.loss_weight or args.link_weight or args.onehot_weight:
        base = qubo_mod.default_weights(dataset.targets - dataset.targets.mean())
        weights = qubo_mod.PenaltyWeights(
            loss=args.loss_weight or base.loss,
            link=args.link_weight or base.link,
            onehot=args.onehot_weight or base.onehot,
        )
    problem, layout = qubo_mod.build_split_qubo(
        dataset,
        args.max_conditions,
        min_ratio=args.min_ratio,
        weights=weights,
        standardize=not args.no_standardize,
    )
    qubo_mod.write_qubo_text(problem, args.out_qubo)
    if args.out_layout:
        layout.save_json(args.out_layout)
    print(f"wrote QUBO with {problem.n_vars} variables, {problem.n_terms} terms to {args.out_qubo}")
    return 0


def _cmd_anneal(args) -> int:
    problem = qubo_mod.read_qubo_text(args.qubo)
    schedule = _schedule_from_args(args, problem)
    results = run_trials(problem, schedule, args.trials, args.seed, n_jobs=args.jobs)
    best = min(results, key=lambda r: r.energy)
    payload = {
        "n_trials": len(results),
        "best_energy": best.energy,
        "best_seed": best.seed,
        "best_assignment": [int(b) for b in best.assignment],
        "energies": [r.energy for r in results],
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    print(f"best energy {best.energy:.6g} from seed {best.seed}")
    return 0


def _cmd_oracle(args) -> int:
    dataset = _load_dataset(args)
    cmse, cvec = tree_mod.cmse_oracle(dataset)
    payload = {
        "cmse": cmse,
        "cmse_condition": cvec.selected_indices[0],
        "cmse_description": dataset.describe_condition(cvec.selected_indices[0]),
    }
    if args.max_conditions is not None:
        swmse, vector = tree_mod.brute_force_best(
            dataset, args.max_conditions, min_ratio=args.min_ratio or 0.0
        )
        split = tree_mod.extract_split(vector, dataset)
        m = tree_mod.metrics(split, dataset)
        payload["brute_force"] = {
            "swmse": swmse,
            "mse": m.mse,
            "selected": vector.selected_indices,
            "descriptions": [dataset.describe_condition(b) for b in vector.selected_indices],
        }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    print(json.dumps(payload, indent=2))
    return 0


def _maybe_int(value):
    return None if value is None else int(value)


def _experiment_config(args) -> exp_mod.ExperimentConfig:
    settings: dict = {}
    if args.config:
        with open(args.config, "rb") as fh:
            settings.update(tomllib.load(fh))

    def pick(name, flag_value, default=None):
        if flag_value is not None:
            return flag_value
        return settings.get(name, default)

    mode = args.experiment_mode
    synthetic = None
    samples = pick("samples", args.samples)
    conditions = pick("conditions", args.conditions)
    k = pick("k", args.k)
    if samples and conditions and k:
        synthetic = data_mod.SyntheticSpec(int(samples), int(conditions), int(k))
    schedule = None
    sweeps = pick("sweeps", args.sweeps, 10000)
    t_start = pick("t_start", args.t_start)
    t_end = pick("t_end", args.t_end)
    if t_start is not None and t_end is not None:
        schedule = Schedule(
            t_start=float(t_start), t_end=float(t_end), sweeps=int(sweeps)
        )
    config = exp_mod.ExperimentConfig(
        mode=mode if mode != "ablation" else "ablation",
        synthetic=synthetic,
        csv_path=pick("csv", args.csv),
        schema_path=pick("schema", args.schema),
        subsample_n=pick("subsample", args.subsample),
        max_conditions=int(pick("max_conditions", args.max_conditions, 1)),
        min_ratio=pick("min_ratio", args.min_ratio),
        schedule=schedule,
        sweeps=int(sweeps),
        n_trials=int(pick("trials", args.trials, 100)),
        n_repeats=_maybe_int(pick("repeats", args.repeats)),
        base_seed=int(pick("seed", args.seed, 0)),
        n_jobs=int(pick("jobs", args.jobs, 1)),
        plot_x=pick("plot_x", args.plot_x, "max_conditions"),
        output=pick("out", args.out),
    )
    return config


def _cmd_experiment(args) -> int:
    config = _experiment_config(args)
    mode = args.experiment_mode
    if mode == "synthetic":
        summary = exp_mod.run_synthetic_experiment(config)
        _print_aggregate(summary)
        if config.output:
            exp_mod.export_report(summary, config.output)
    elif mode == "real":
        summary = exp_mod.run_real_experiment(config)
        _print_aggregate(summary)
        if config.output:
            exp_mod.export_report(summary, config.output)
    else:
        results = exp_mod.run_ablation_experiment(config)
        for arm in ("without", "with"):
            print(f"[{arm}]")
            _print_aggregate(results[arm])
        if config.output:
            exp_mod.export_ablation_report(results, config.output)
    return 0


def _print_aggregate(summary: exp_mod.ExperimentSummary) -> None:
    print(f"mode={summary.mode} n_conditions={summary.n_conditions}")
    for name, stats in summary.aggregate.items():
        print(f"  {name}: {stats['mean']:.1f} +/- {stats['std']:.1f}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubosplit",
        description="Single-split regression trees via QUBO annealing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("binarize", help="raw CSV + schema -> binary dataset")
    p.add_argument("--input", required=True, help="raw CSV with header row")
    p.add_argument("--schema", required=True, help="JSON schema tagging column kinds")
    p.add_argument("--q", type=int, default=None, help="quantile count (thresholds at k/q)")
    p.add_argument("--fractions", default="0.33,0.66", help="explicit quantile fractions")
    p.add_argument("--max-categories", type=int, default=3)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-meta", default=None)
    p.set_defaults(func=_cmd_binarize)

    p = sub.add_parser("gen-synthetic", help="planted logical-product dataset")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--conditions", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-meta", default=None)
    p.set_defaults(func=_cmd_gen_synthetic)

    p = sub.add_parser("build-qubo", help="dataset -> QUBO text export")
    _add_dataset_args(p)
    p.add_argument("--max-conditions", type=int, required=True)
    p.add_argument("--min-ratio", type=float, default=None)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--loss-weight", type=float, default=None)
    p.add_argument("--link-weight", type=float, default=None)
    p.add_argument("--onehot-weight", type=float, default=None)
    p.add_argument("--out-qubo", required=True)
    p.add_argument("--out-layout", default=None)
    p.set_defaults(func=_cmd_build_qubo)

    p = sub.add_parser("anneal", help="run annealing trials on a QUBO text file")
    p.add_argument("--qubo", required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    _schedule_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_anneal)

    p = sub.add_parser("oracle", help="single-condition baseline and brute-force search")
    _add_dataset_args(p)
    p.add_argument("--max-conditions", type=int, default=None, help="also run brute force")
    p.add_argument("--min-ratio", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("experiment", help="repeated multi-trial experiment harness")
    p.add_argument("experiment_mode", choices=["synthetic", "real", "ablation"])
    p.add_argument("--config", default=None, help="TOML settings file")
    _add_dataset_args(p)
    p.add_argument("--schema", default=None)
    p.add_argument("--subsample", type=int, default=None)
    p.add_argument("--max-conditions", type=int, default=None)
    p.add_argument("--min-ratio", type=float, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--plot-x", default=None, choices=["max_conditions", "n_conditions", "n_samples"])
    _schedule_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
