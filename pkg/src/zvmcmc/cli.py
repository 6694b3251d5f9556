"""Command line front end.

Subcommands:
  run       execute a replication study from a JSON config
  diagnose  single-chain diagnostics for a config
  validate  check a config (and its data file) without sampling
  version   print the package version

Exit codes: 0 success (including a partial study, flagged in the report),
1 runtime failure, 2 bad usage or bad config.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .data_io import DataLoadError, export_study
from .experiments import (
    ConfigError,
    ExperimentConfig,
    build_model,
    run_coverage,
    run_diagnose,
    run_study,
    write_study_csv,
    _basis_for_degree,
    _resolve_exclusions,
    _sampler_method,
)

__all__ = ["main", "entry"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zvmcmc",
        description="Variance reduction for MCMC estimates via gradient-based polynomial control variates.",
    )
    parser.add_argument("--version", action="version", version=f"zvmcmc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a replication study")
    _add_config_arguments(run_p)
    run_p.add_argument("--replications", type=int, default=None, help="override replication count")
    run_p.add_argument("--single-chain", action="store_true", default=None,
                       help="fit and evaluate on the same chain")
    run_p.add_argument("--keep-chains", action="store_true", default=None,
                       help="write every sampled chain to CSV under the output directory")

    cov_p = sub.add_parser("coverage", help="check ZV estimates against a long reference chain")
    _add_config_arguments(cov_p)
    cov_p.add_argument("--replications", type=int, default=None, help="override replication count")

    diag_p = sub.add_parser("diagnose", help="run single-chain diagnostics")
    _add_config_arguments(diag_p)
    diag_p.add_argument("--length", type=int, default=None, help="override diagnostic chain length")

    val_p = sub.add_parser("validate", help="validate a config without sampling")
    val_p.add_argument("--config", required=True, help="path to a JSON config file")
    val_p.add_argument("--add-intercept", action="store_true", default=None,
                       help="prepend an intercept column to loaded regression data")

    sub.add_parser("version", help="print the package version")
    return parser


def _add_config_arguments(sub_parser) -> None:
    sub_parser.add_argument("--config", required=True, help="path to a JSON config file")
    sub_parser.add_argument("--out", default=None, help="output directory (default from config)")
    sub_parser.add_argument("--seed", type=int, default=None, help="override base_seed")
    sub_parser.add_argument("--degrees", default=None,
                            help="comma-separated polynomial degrees, e.g. 1,2,3")
    sub_parser.add_argument("--threads", type=int, default=None,
                            help="worker processes (0 = one per CPU)")
    sub_parser.add_argument("--add-intercept", action="store_true", default=None,
                            help="prepend an intercept column to loaded regression data")


def _load_config(args) -> ExperimentConfig:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {args.config}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}:{exc.lineno}: malformed JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{args.config}: config must be a JSON object")

    overrides = {
        "seed": "base_seed",
        "out": "output_dir",
        "replications": "replications",
        "threads": "threads",
        "length": "diagnose_length",
    }
    for arg_name, key in overrides.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            raw[key] = value
    for flag, key in (("single_chain", "single_chain"), ("keep_chains", "keep_chains"),
                      ("add_intercept", "add_intercept")):
        if getattr(args, flag, None):
            raw[key] = True
    if getattr(args, "degrees", None) is not None:
        try:
            raw["degrees"] = [int(tok) for tok in args.degrees.split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"--degrees expects comma-separated integers, got {args.degrees!r}") from None
    return ExperimentConfig.from_dict(raw)


def _fmt_float(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, str):
        return v
    if np.isnan(v):
        return "n/a"
    if np.isinf(v):
        return "inf"
    return f"{v:.4g}"


def _fmt_ratio(entry: dict) -> str:
    point = "inf" if entry["ratio_infinite"] else _fmt_float(entry["ratio"])
    if entry["ratio_method"] == "paired-percentile-bootstrap":
        return f"{point} [{_fmt_float(entry['ratio_lower'])}, {_fmt_float(entry['ratio_upper'])}]"
    return f"{point} (point only)"


def _cmd_run(args) -> int:
    config = _load_config(args)
    out_dir = config.output_dir
    os.makedirs(out_dir, exist_ok=True)
    chains_dir = os.path.join(out_dir, "chains") if config.keep_chains else None
    _, report = run_study(config, chains_dir=chains_dir)

    print(f"model {report['model']['kind']} (dimension {report['model']['dimension']}), "
          f"sampler {report['model']['sampler']}, protocol {report['protocol']}")
    done = report["replications_completed"]
    asked = report["replications_requested"]
    line = f"replications {done}/{asked}"
    if report["partial"]:
        line += " (partial; see replication_errors in the report)"
    print(line)
    acc = report["accept"]
    print(f"mean accept rate: fit {_fmt_float(acc['fit_rate_mean'])}, "
          f"eval {_fmt_float(acc['eval_rate_mean'])}")
    for name, entry in report["results"].items():
        parts = [f"ordinary var {_fmt_float(entry['ordinary']['variance'])}"]
        for p in report["degrees"]:
            parts.append(f"degree {p} ratio {_fmt_ratio(entry['zv'][str(p)])}")
        print(f"  {name}: " + "; ".join(parts))

    json_path = os.path.join(out_dir, "study.json")
    csv_path = os.path.join(out_dir, "study.csv")
    export_study(report, json_path)
    write_study_csv(report, csv_path)
    print(f"wrote {json_path}")
    print(f"wrote {csv_path}")
    return 0


def _cmd_coverage(args) -> int:
    config = _load_config(args)
    out_dir = config.output_dir
    os.makedirs(out_dir, exist_ok=True)
    _, report = run_coverage(config)

    print(f"model {report['model']['kind']} (dimension {report['model']['dimension']}), "
          f"sampler {report['model']['sampler']}")
    print(f"reference chain: {report['reference']['length']} draws")
    names = report["model"]["parameters"]
    for p, entry in report["coverage"].items():
        per = ", ".join(f"{n} {entry['per_parameter'][n]:.0%}" for n in names)
        print(f"  degree {p}: {entry['events_inside']}/{entry['events_total']} inside "
              f"({entry['fraction']:.1%}; {per})")

    json_path = os.path.join(out_dir, "coverage.json")
    export_study(report, json_path)
    print(f"wrote {json_path}")
    return 0


def _cmd_diagnose(args) -> int:
    config = _load_config(args)
    out_dir = config.output_dir
    os.makedirs(out_dir, exist_ok=True)
    report = run_diagnose(config)

    print(f"model {report['model']['kind']} (dimension {report['model']['dimension']}), "
          f"sampler {report['model']['sampler']}, chain length {report['chain']['length']}")
    print(f"accept rate {_fmt_float(report['chain']['accept_rate'])}, "
          f"basis degree {report['basis']['degree']} with {report['basis']['size']} terms")
    z = np.asarray(report["zero_mean"]["z_scores"], dtype=float)
    degen = np.asarray(report["zero_mean"]["degenerate"], dtype=bool)
    worst = np.nanmax(np.abs(z)) if not np.all(np.isnan(z)) else float("nan")
    print(f"control variate zero-mean check: worst |z| {_fmt_float(worst)} "
          f"over {z.size} terms ({int(degen.sum())} degenerate)")
    linnik_divergent = np.asarray(report["linnik"]["divergent"], dtype=bool)
    names = report["model"]["parameters"]
    flagged = [names[i] for i in range(len(names)) if linnik_divergent[i]]
    print("gradient second-moment check: " + ("divergent for " + ", ".join(flagged) if flagged else "stable"))
    stable = np.asarray(report["moment_2_plus_delta"]["stable"], dtype=bool)
    n_unstable = int((~stable).sum())
    print(f"2+delta moment check: {n_unstable} unstable of {stable.size} terms")
    ref_point = np.asarray(report["reference"]["point"], dtype=float)
    ref_lo = np.asarray(report["reference"]["lower"], dtype=float)
    ref_hi = np.asarray(report["reference"]["upper"], dtype=float)
    for i, name in enumerate(names):
        print(f"  {name}: mean {_fmt_float(ref_point[i])} "
              f"[{_fmt_float(ref_lo[i])}, {_fmt_float(ref_hi[i])}]")

    json_path = os.path.join(out_dir, "diagnose.json")
    export_study(report, json_path)
    print(f"wrote {json_path}")
    return 0


def _cmd_validate(args) -> int:
    config = _load_config(args)
    model = build_model(config)
    exclusions = _resolve_exclusions(config, model)
    sizes = {p: _basis_for_degree(model.dimension, p, exclusions).size for p in config.degrees}
    size_text = ", ".join(f"degree {p}: {k} terms" for p, k in sizes.items())
    print(f"config ok: model {config.model_kind} (dimension {model.dimension}), "
          f"sampler {_sampler_method(config)}, {size_text}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "version":
        print(f"zvmcmc {__version__}")
        return 0
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "coverage":
            return _cmd_coverage(args)
        if args.command == "diagnose":
            return _cmd_diagnose(args)
        if args.command == "validate":
            return _cmd_validate(args)
    except (ConfigError, DataLoadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, FloatingPointError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    parser.error(f"unknown command {args.command!r}")
    return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
