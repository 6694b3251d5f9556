"""Replication studies tying models, samplers and control variates together.

A study runs R independent replications.  Replication r draws a fit chain
with seed base_seed + 2r and an evaluation chain with seed base_seed + 2r+1,
estimates control variate coefficients on the first, and averages both the
plain f and the renormalized ftilde on the second.  Across-replication
variances of those averages give the variance-reduction ratios.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .data_io import (
    export_chain,
    load_design_matrix,
    load_price_series,
    prices_to_returns,
    synthetic_banknote,
    synthetic_demgbp_returns,
)
from .diagnostics import (
    ReplicationStudy,
    cv_zero_mean_test,
    linnik_estimate,
    long_chain_reference,
    moment_diagnostic,
    variance_ratio,
)
from .models import (
    ExponentialTarget,
    GammaTarget,
    GarchPrior,
    GarchTarget,
    GaussianTarget,
    LogitTarget,
    ProbitTarget,
)
from .samplers import SamplerConfig, sample_chain
from .zv import (
    ControlVariateMatrix,
    default_exclusions,
    eval_control_variates,
    fit_coefficients,
    monomial_basis,
    renormalize,
    standardization_from_chain,
)

__all__ = ["ConfigError", "ExperimentConfig", "build_model", "run_study", "run_coverage",
           "run_diagnose", "write_study_csv"]

MODEL_KINDS = ("gaussian", "exponential", "gamma", "probit", "logit", "garch")
SAMPLER_TYPES = ("auto", "rwmh", "gibbs")
F_TRANSFORMS = ("identity", "square", "exp")

# seed offsets for streams outside the per-replication pairs; far above any
# realistic 2 * replications
_BOOTSTRAP_SEED_OFFSET = 10_000_079
_REFERENCE_SEED_OFFSET = 10_000_019


class ConfigError(ValueError):
    """Configuration rejected before any sampling started."""


@dataclass
class ExperimentConfig:
    """Flat experiment description; one JSON object, every field overridable.

    Defaults follow the shipped experiment protocol: 1000 burn-in, 2000-draw
    fit chains, replications with paired seeds, two-chain estimation.

    With single_chain the one chain per replication has eval_length draws and
    serves both roles; fit_length is not used by that protocol.
    """

    model_kind: str
    data_path: str | None = None
    add_intercept: bool = False
    synthetic_seed: int | None = None
    mu: float = 0.0
    sigma2: float = 1.0
    lam: float = 1.0
    gamma_shape: float = 3.0
    gamma_scale: float = 1.0
    prior_sd: tuple = (1000.0, 1000.0, 1000.0)
    sampler_type: str = "auto"
    burn_in: int = 1000
    fit_length: int = 2000
    eval_length: int = 2000
    thin: int = 1
    proposal_sd: tuple | None = None
    init: tuple | None = None
    base_seed: int = 0
    degrees: tuple = (1, 2)
    exclusions: object = "default"
    single_chain: bool = False
    f_transform: str = "identity"
    replications: int = 100
    bootstrap_resamples: int = 1000
    reference_length: int = 1_000_000
    diagnose_length: int = 20_000
    threads: int = 0
    output_dir: str = "out"
    keep_chains: bool = False
    notes: str | None = None

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ConfigError(f"model_kind must be one of {MODEL_KINDS}, got {self.model_kind!r}")
        if self.sampler_type not in SAMPLER_TYPES:
            raise ConfigError(f"sampler_type must be one of {SAMPLER_TYPES}, got {self.sampler_type!r}")
        if self.sampler_type == "gibbs" and self.model_kind != "probit":
            raise ConfigError("sampler_type 'gibbs' is only available for model_kind 'probit'")
        if self.f_transform not in F_TRANSFORMS:
            raise ConfigError(f"f_transform must be one of {F_TRANSFORMS}, got {self.f_transform!r}")
        if isinstance(self.degrees, str):
            raise ConfigError(f"degrees must be a list of integers, got {self.degrees!r}")
        try:
            degrees = tuple(int(p) for p in self.degrees)
        except (TypeError, ValueError):
            raise ConfigError(f"degrees must be a list of integers, got {self.degrees!r}") from None
        if not degrees or any(p not in (1, 2, 3) for p in degrees):
            raise ConfigError(f"degrees must be a non-empty subset of [1, 2, 3], got {list(degrees)}")
        if len(set(degrees)) != len(degrees):
            raise ConfigError(f"degrees must not repeat, got {list(degrees)}")
        self.degrees = degrees
        for name in ("burn_in", "fit_length", "eval_length", "replications", "bootstrap_resamples",
                     "reference_length", "diagnose_length", "threads", "base_seed"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ConfigError(f"{name} must be a non-negative integer, got {v!r}")
            setattr(self, name, int(v))
        if int(self.thin) != self.thin or self.thin < 1:
            raise ConfigError(f"thin must be an integer >= 1, got {self.thin!r}")
        self.thin = int(self.thin)
        if self.fit_length < 100 or self.eval_length < 100:
            raise ConfigError(
                f"phase lengths must be >= 100, got fit_length={self.fit_length}, "
                f"eval_length={self.eval_length}"
            )
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.bootstrap_resamples < 1:
            raise ConfigError("bootstrap_resamples must be >= 1")
        if self.base_seed >= 2**63:
            raise ConfigError(f"base_seed too large for the seed arithmetic, got {self.base_seed}")
        if not isinstance(self.exclusions, str):
            try:
                self.exclusions = tuple(tuple(int(k) for k in e) for e in self.exclusions)
            except (TypeError, ValueError):
                raise ConfigError(f"exclusions must be 'default' or a list of exponent lists") from None
        elif self.exclusions != "default":
            raise ConfigError(f"exclusions must be 'default' or a list of exponent lists, got {self.exclusions!r}")
        prior_sd = tuple(float(v) for v in self.prior_sd)
        if len(prior_sd) != 3 or any(not np.isfinite(v) or v <= 0 for v in prior_sd):
            raise ConfigError(f"prior_sd must be 3 positive numbers, got {self.prior_sd!r}")
        self.prior_sd = prior_sd
        if self.proposal_sd is not None:
            self.proposal_sd = tuple(float(v) for v in self.proposal_sd)
        if self.init is not None:
            self.init = tuple(float(v) for v in self.init)
        if self.notes is not None and not isinstance(self.notes, str):
            raise ConfigError(f"notes must be a string, got {type(self.notes).__name__}")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"config must be a JSON object, got {type(raw).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "model_kind" not in raw:
            raise ConfigError("config is missing required key 'model_kind'")
        return cls(**raw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: malformed JSON ({exc.msg})") from None
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("prior_sd", "degrees", "proposal_sd", "init"):
            if out[key] is not None:
                out[key] = list(out[key])
        if not isinstance(out["exclusions"], str):
            out["exclusions"] = [list(e) for e in out["exclusions"]]
        return out


def build_model(config: ExperimentConfig):
    """Construct the target described by the config, loading or generating data."""
    kind = config.model_kind
    if kind == "gaussian":
        return GaussianTarget(config.mu, config.sigma2)
    if kind == "exponential":
        return ExponentialTarget(config.lam)
    if kind == "gamma":
        return GammaTarget(config.gamma_shape, config.gamma_scale)
    if kind in ("probit", "logit"):
        if config.data_path is not None:
            if not os.path.exists(config.data_path):
                raise ConfigError(f"data file not found: {config.data_path}")
            data = load_design_matrix(config.data_path, add_intercept=config.add_intercept)
        else:
            seed = config.synthetic_seed if config.synthetic_seed is not None else 101
            data = synthetic_banknote(seed=seed)
        return ProbitTarget(data) if kind == "probit" else LogitTarget(data)
    if kind == "garch":
        if config.data_path is not None:
            if not os.path.exists(config.data_path):
                raise ConfigError(f"data file not found: {config.data_path}")
            series = prices_to_returns(load_price_series(config.data_path))
        else:
            seed = config.synthetic_seed if config.synthetic_seed is not None else 333
            series = synthetic_demgbp_returns(seed=seed)
        return GarchTarget(series, GarchPrior(np.asarray(config.prior_sd)))
    raise ConfigError(f"unhandled model kind {kind!r}")


def _sampler_method(config: ExperimentConfig) -> str:
    if config.sampler_type == "auto":
        return "gibbs" if config.model_kind == "probit" else "rwmh"
    return config.sampler_type


def _transform_by_name(name):
    if name == "identity":
        return (lambda v: v), (lambda s: s)
    if name == "square":
        return (lambda v: v * v), (lambda s: f"{s}^2")
    return np.exp, (lambda s: f"exp({s})")


def _resolve_exclusions(config: ExperimentConfig, model):
    if config.exclusions == "default":
        return default_exclusions(model)
    return config.exclusions


def _basis_for_degree(dimension, degree, exclusions):
    usable = tuple(e for e in exclusions if sum(e) <= degree)
    return monomial_basis(dimension, degree, usable)


def _replicate(args):
    (model, method, r, base_seed, burn_in, fit_length, eval_length, proposal_sd,
     init, degrees, exclusions, single_chain, transform_name, chains_dir, thin) = args
    apply_f, _ = _transform_by_name(transform_name)
    fit_seed = base_seed + 2 * r
    eval_seed = base_seed + 2 * r + 1
    out = {"r": r, "error": None, "fit_seed": fit_seed, "eval_seed": eval_seed}
    try:
        t0 = time.perf_counter()
        if single_chain:
            chain_cfg = SamplerConfig(length=eval_length, burn_in=burn_in, seed=fit_seed,
                                      init=init, thin=thin,
                                      proposal_sd=proposal_sd if method == "rwmh" else None)
            fit_chain = eval_chain = sample_chain(model, chain_cfg, method=method)
            t1 = t2 = time.perf_counter()
        else:
            fit_cfg = SamplerConfig(length=fit_length, burn_in=burn_in, seed=fit_seed,
                                    init=init, thin=thin,
                                    proposal_sd=proposal_sd if method == "rwmh" else None)
            fit_chain = sample_chain(model, fit_cfg, method=method)
            t1 = time.perf_counter()
            eval_cfg = SamplerConfig(length=eval_length, burn_in=burn_in, seed=eval_seed,
                                     init=init, thin=thin,
                                     proposal_sd=proposal_sd if method == "rwmh" else None)
            eval_chain = sample_chain(model, eval_cfg, method=method)
            t2 = time.perf_counter()

        if chains_dir is not None:
            export_chain(fit_chain, os.path.join(chains_dir, f"rep{r:04d}_fit.csv"))
            if eval_chain is not fit_chain:
                export_chain(eval_chain, os.path.join(chains_dir, f"rep{r:04d}_eval.csv"))

        d = model.dimension
        p_max = max(degrees)
        basis_max = _basis_for_degree(d, p_max, exclusions)
        center, scale = standardization_from_chain(fit_chain)
        cv_fit_max = eval_control_variates(fit_chain, basis_max, center=center, scale=scale)
        cv_eval_max = cv_fit_max if eval_chain is fit_chain else eval_control_variates(
            eval_chain, basis_max, center=center, scale=scale)
        f_fit = apply_f(fit_chain.draws)
        f_eval = apply_f(eval_chain.draws)

        out["ordinary"] = f_eval.mean(axis=0)
        zv = {}
        dropped_any = {}
        ridge_any = {}
        for p in degrees:
            basis_p = _basis_for_degree(d, p, exclusions)
            k_p = basis_p.size
            cv_fit_p = ControlVariateMatrix(values=cv_fit_max.values[:, :k_p], basis=basis_p,
                                            center=center, scale=scale)
            cv_eval_p = ControlVariateMatrix(values=cv_eval_max.values[:, :k_p], basis=basis_p,
                                             center=center, scale=scale)
            est = np.empty(d)
            dropped = False
            ridge = False
            for j in range(d):
                fit = fit_coefficients(cv_fit_p, f_fit[:, j])
                est[j] = renormalize(f_eval[:, j], cv_eval_p, fit).mean()
                dropped = dropped or bool(fit.dropped_columns)
                ridge = ridge or fit.ridge_applied
            zv[p] = est
            dropped_any[p] = dropped
            ridge_any[p] = ridge
        t3 = time.perf_counter()

        out["zv"] = zv
        out["dropped"] = dropped_any
        out["ridge"] = ridge_any
        out["fit_accept"] = fit_chain.accept_rate
        out["eval_accept"] = eval_chain.accept_rate
        out["pilot_accept"] = fit_chain.pilot_accept_rate
        out["t_fit"] = t1 - t0
        out["t_eval"] = t2 - t1
        out["t_post"] = t3 - t2
    except Exception as exc:  # a failed replication is recorded, not fatal
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def run_study(config: ExperimentConfig, chains_dir=None):
    """Run the full replication study.

    Returns (study, report): the ReplicationStudy with one row per successful
    replication and a JSON-ready report dict.  Wall-clock numbers live only
    under report["timing"] so the rest is reproducible byte for byte.
    """
    model = build_model(config)
    method = _sampler_method(config)
    exclusions = _resolve_exclusions(config, model)
    # fail fast on exclusions that do not name basis exponents
    for p in config.degrees:
        _basis_for_degree(model.dimension, p, exclusions)
    _, name_f = _transform_by_name(config.f_transform)
    parameter_names = tuple(name_f(n) for n in model.parameter_names)
    if chains_dir is not None:
        os.makedirs(chains_dir, exist_ok=True)
    init = np.asarray(config.init, dtype=float) if config.init is not None else None
    proposal_sd = np.asarray(config.proposal_sd, dtype=float) if config.proposal_sd is not None else None

    t_start = time.perf_counter()
    tasks = [
        (model, method, r, config.base_seed, config.burn_in, config.fit_length,
         config.eval_length, proposal_sd, init, config.degrees, exclusions,
         config.single_chain, config.f_transform, chains_dir, config.thin)
        for r in range(config.replications)
    ]
    workers = config.threads if config.threads > 0 else (os.cpu_count() or 1)
    if workers > 1 and config.replications > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_replicate, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        rows = [_replicate(t) for t in tasks]
    rows.sort(key=lambda row: row["r"])
    total_seconds = time.perf_counter() - t_start

    good = [row for row in rows if row["error"] is None]
    errors = [{"replication": row["r"], "error": row["error"]} for row in rows if row["error"] is not None]
    if not good:
        raise RuntimeError(
            "every replication failed; first error: " + errors[0]["error"]
        )

    ordinary = np.vstack([row["ordinary"] for row in good])
    zv_estimates = {p: np.vstack([row["zv"][p] for row in good]) for p in config.degrees}
    seeds = np.array([row["fit_seed"] for row in good], dtype=np.uint64)
    t_fit = sum(row["t_fit"] for row in good)
    t_eval = sum(row["t_eval"] for row in good)
    t_post = sum(row["t_post"] for row in good)
    study = ReplicationStudy(
        ordinary_estimates=ordinary,
        zv_estimates=zv_estimates,
        seeds=seeds,
        parameter_names=parameter_names,
        timings={
            "fit_chain_seconds": t_fit,
            "eval_chain_seconds": t_eval,
            "post_seconds": t_post,
            "total_seconds": total_seconds,
        },
    )

    results = {}
    boot_seed = config.base_seed + _BOOTSTRAP_SEED_OFFSET
    for j, name in enumerate(parameter_names):
        entry = {
            "ordinary": {
                "estimate_mean": float(ordinary[:, j].mean()),
                "variance": float(ordinary[:, j].var(ddof=1)) if len(good) > 1 else None,
            },
            "zv": {},
        }
        for p in config.degrees:
            zj = zv_estimates[p][:, j]
            deg_entry = {
                "estimate_mean": float(zj.mean()),
                "variance": float(zj.var(ddof=1)) if len(good) > 1 else None,
            }
            if len(good) > 1:
                rep = variance_ratio(study, j, p, resamples=config.bootstrap_resamples,
                                     seed=boot_seed + j * 10 + p)
                deg_entry.update(
                    ratio=rep.point,
                    ratio_infinite=rep.infinite,
                    ratio_lower=rep.lower,
                    ratio_upper=rep.upper,
                    ratio_method=rep.method,
                )
            else:
                deg_entry.update(ratio=None, ratio_infinite=False, ratio_lower=None,
                                 ratio_upper=None, ratio_method="unavailable")
            deg_entry["dropped_column_replications"] = int(sum(row["dropped"][p] for row in good))
            deg_entry["ridge_replications"] = int(sum(row["ridge"][p] for row in good))
            entry["zv"][str(p)] = deg_entry
        results[name] = entry

    pilot_rates = [row["pilot_accept"] for row in good if row["pilot_accept"] is not None]
    # the zv arm pays for both chains plus the post-processing; in single-chain
    # mode the one chain (booked under t_fit) serves both estimators
    t_ordinary = t_fit if config.single_chain else t_eval
    t_zv = (t_fit + t_post) if config.single_chain else (t_fit + t_eval + t_post)
    report = {
        "schema": "zvmcmc-study-v1",
        "package_version": __version__,
        "config": config.to_dict(),
        "model": {
            "kind": model.tag,
            "dimension": model.dimension,
            "parameters": list(parameter_names),
            "sampler": method,
        },
        "protocol": "single-chain" if config.single_chain else "two-chain",
        "degrees": list(config.degrees),
        "replications_requested": config.replications,
        "replications_completed": len(good),
        "partial": bool(errors),
        "replication_errors": errors,
        "seeds": {
            "base": config.base_seed,
            "fit": [row["fit_seed"] for row in good],
            "eval": [row["eval_seed"] for row in good],
        },
        "per_replication_estimates": {
            "ordinary": [[float(v) for v in row] for row in ordinary],
            "zv": {str(p): [[float(v) for v in row] for row in zv_estimates[p]]
                   for p in config.degrees},
        },
        "accept": {
            "fit_rate_mean": float(np.mean([row["fit_accept"] for row in good])),
            "eval_rate_mean": float(np.mean([row["eval_accept"] for row in good])),
            "pilot_rate_mean": float(np.mean(pilot_rates)) if pilot_rates else None,
        },
        "results": results,
        "timing": {
            "fit_chain_seconds": t_fit,
            "eval_chain_seconds": t_eval,
            "post_seconds": t_post,
            "total_seconds": total_seconds,
            "ordinary_seconds": t_ordinary,
            "zv_seconds": t_zv,
            "zv_over_ordinary": (t_zv / t_ordinary) if t_ordinary > 0 else None,
        },
    }
    return study, report


def write_study_csv(report: dict, path) -> None:
    """One row per replication, parameter and estimator."""
    import csv as _csv

    config = report["config"]
    degrees = report["degrees"]
    params = report["model"]["parameters"]
    fit_seeds = report["seeds"]["fit"]
    eval_seeds = report["seeds"]["eval"]
    per_rep = report["per_replication_estimates"]
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["replication", "parameter", "method", "estimate", "fit_seed", "eval_seed"])
        for i in range(len(fit_seeds)):
            for j, name in enumerate(params):
                writer.writerow([i, name, "ordinary", f"{per_rep['ordinary'][i][j]:.17g}",
                                 fit_seeds[i], eval_seeds[i]])
                for p in degrees:
                    writer.writerow([i, name, f"zv{p}", f"{per_rep['zv'][str(p)][i][j]:.17g}",
                                     fit_seeds[i], eval_seeds[i]])


def run_coverage(config: ExperimentConfig):
    """Unbiasedness check against a long ordinary reference chain.

    One ordinary chain of reference_length draws (no gradients) gives a 95%
    batch-means interval per coordinate.  Each of the R replications then
    draws a single short chain of eval_length draws, fits and evaluates the
    control variates on it, and the report counts how often each ZV estimate
    lands inside the reference interval, per degree, pooled over coordinates.
    """
    if not config.single_chain:
        raise ConfigError("the coverage protocol estimates from single chains; set single_chain to true")
    if config.f_transform != "identity":
        raise ConfigError("coverage compares coordinate means; f_transform must be 'identity'")
    model = build_model(config)
    method = _sampler_method(config)
    proposal_sd = np.asarray(config.proposal_sd, dtype=float) if config.proposal_sd is not None else None

    t0 = time.perf_counter()
    ref_seed = config.base_seed + _REFERENCE_SEED_OFFSET
    reference = long_chain_reference(
        model, config.reference_length, ref_seed, method=method,
        burn_in=config.burn_in, proposal_sd=proposal_sd,
    )
    t_reference = time.perf_counter() - t0

    study, study_report = run_study(config)
    inside = {}
    for p in config.degrees:
        est = study.zv_estimates[p]
        inside[p] = (est >= reference.lower[None, :]) & (est <= reference.upper[None, :])

    names = study.parameter_names
    coverage = {}
    for p in config.degrees:
        mask = inside[p]
        coverage[str(p)] = {
            "fraction": float(mask.mean()),
            "events_inside": int(mask.sum()),
            "events_total": int(mask.size),
            "per_parameter": {names[j]: float(mask[:, j].mean()) for j in range(len(names))},
        }

    study_block = {k: v for k, v in study_report.items() if k != "timing"}
    report = {
        "schema": "zvmcmc-coverage-v1",
        "package_version": __version__,
        "config": config.to_dict(),
        "model": study_report["model"],
        "reference": {
            "length": reference.length,
            "seed": ref_seed,
            "point": [float(v) for v in reference.point],
            "lower": [float(v) for v in reference.lower],
            "upper": [float(v) for v in reference.upper],
            "asvar": [float(v) for v in reference.asvar],
        },
        "coverage": coverage,
        "study": study_block,
        "timing": {
            "reference_seconds": t_reference,
            "study_seconds": study_report["timing"]["total_seconds"],
            "total_seconds": time.perf_counter() - t0,
        },
    }
    return study, report


def run_diagnose(config: ExperimentConfig):
    """Draw one chain and run every diagnostic on it.

    The reference point and interval come from the same chain, so this stays
    a single-chain operation.  All flags are advisory.
    """
    model = build_model(config)
    method = _sampler_method(config)
    exclusions = _resolve_exclusions(config, model)
    proposal_sd = np.asarray(config.proposal_sd, dtype=float) if config.proposal_sd is not None else None
    init = np.asarray(config.init, dtype=float) if config.init is not None else None
    t0 = time.perf_counter()
    chain_cfg = SamplerConfig(length=config.diagnose_length, burn_in=config.burn_in,
                              seed=config.base_seed, init=init,
                              proposal_sd=proposal_sd if method == "rwmh" else None)
    chain = sample_chain(model, chain_cfg, method=method)
    p_max = max(config.degrees)
    basis = _basis_for_degree(model.dimension, p_max, exclusions)
    center, scale = standardization_from_chain(chain)
    cv = eval_control_variates(chain, basis, center=center, scale=scale)
    zero_mean = cv_zero_mean_test(cv)
    linnik = linnik_estimate(chain)
    moments = moment_diagnostic(cv)
    reference = long_chain_reference(model, chain.length, chain.seed_used, chain=chain)
    elapsed = time.perf_counter() - t0

    return {
        "schema": "zvmcmc-diagnose-v1",
        "package_version": __version__,
        "config": config.to_dict(),
        "model": {
            "kind": model.tag,
            "dimension": model.dimension,
            "parameters": list(model.parameter_names),
            "sampler": method,
        },
        "chain": {
            "length": chain.length,
            "burn_in": config.burn_in,
            "seed": chain.seed_used,
            "accept_rate": chain.accept_rate,
            "pilot_accept_rate": chain.pilot_accept_rate,
        },
        "basis": {
            "degree": p_max,
            "size": basis.size,
            "exponents": [list(a) for a in basis.active],
            "excluded": [list(a) for a in basis.excluded],
        },
        "zero_mean": {
            "z_scores": zero_mean.z_scores,
            "degenerate": zero_mean.degenerate,
            "batch_count": zero_mean.batch_count,
        },
        "linnik": {
            "estimates": linnik.estimates,
            "divergent": linnik.divergent,
        },
        "moment_2_plus_delta": {
            "delta": moments.delta,
            "means": moments.means,
            "stable": moments.stable,
        },
        "reference": {
            "point": reference.point,
            "lower": reference.lower,
            "upper": reference.upper,
            "length": reference.length,
        },
        "timing": {"total_seconds": elapsed},
    }
