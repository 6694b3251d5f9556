"""Diagnostics for chains, control variates and replication studies."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .samplers import ChainOutput, SamplerConfig, sample_chain
from .zv import ControlVariateMatrix, DEGENERATE_REL_TOL

__all__ = [
    "batch_means_asvar",
    "ReplicationStudy",
    "RatioReport",
    "variance_ratio",
    "ZeroMeanReport",
    "cv_zero_mean_test",
    "LinnikReport",
    "linnik_estimate",
    "MomentReport",
    "moment_diagnostic",
    "ReferenceReport",
    "long_chain_reference",
]

MIN_BATCH_COUNT = 10


def batch_means_asvar(series, batch_count: int) -> float:
    """Batch-means estimate of the asymptotic variance of the series mean.

    Splits the first batch_count * floor(N / batch_count) entries into equal
    batches and returns batch_size * var(batch means, ddof=1).  Dividing by N
    gives the squared standard error of the overall mean.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be 1-d")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite entries")
    if int(batch_count) != batch_count or batch_count < MIN_BATCH_COUNT:
        raise ValueError(f"batch_count must be an integer >= {MIN_BATCH_COUNT}, got {batch_count}")
    batch_count = int(batch_count)
    if x.size < 2 * batch_count:
        raise ValueError(f"need at least {2 * batch_count} points for {batch_count} batches, got {x.size}")
    batch_size = x.size // batch_count
    means = x[: batch_size * batch_count].reshape(batch_count, batch_size).mean(axis=1)
    return float(batch_size * means.var(ddof=1))


def _default_batch_count(n):
    return max(MIN_BATCH_COUNT, int(np.sqrt(n)))


# ---------------------------------------------------------------------------
# replication studies and variance ratios


@dataclass
class ReplicationStudy:
    """Across-replication estimates for the ordinary and ZV estimators.

    ordinary_estimates is (R, P); zv_estimates maps degree -> (R, P); seeds
    holds the per-replication fit-chain seeds; timings wall-clock seconds per
    arm of the study.
    """

    ordinary_estimates: np.ndarray
    zv_estimates: dict[int, np.ndarray]
    seeds: np.ndarray
    parameter_names: tuple[str, ...]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def replications(self):
        return self.ordinary_estimates.shape[0]


@dataclass(frozen=True)
class RatioReport:
    """Variance ratio var(ordinary)/var(ZV) with a bootstrap interval.

    infinite flags a ZV variance that is numerically zero; the point and the
    interval ends are +inf in that case rather than an exception.
    """

    point: float
    lower: float
    upper: float
    resamples: int
    method: str
    infinite: bool


MIN_INTERVAL_REPLICATIONS = 20


def variance_ratio(
    study: ReplicationStudy,
    parameter: int,
    degree: int,
    resamples: int = 1000,
    seed: int = 0,
) -> RatioReport:
    """Paired percentile bootstrap over replications of the variance ratio.

    The same resampled replication indices feed numerator and denominator.
    Intervals are reported only when the study has at least
    MIN_INTERVAL_REPLICATIONS replications; below that the bounds are NaN.
    """
    ord_est = np.asarray(study.ordinary_estimates[:, parameter], dtype=float)
    if degree not in study.zv_estimates:
        raise KeyError(f"study has no degree {degree} estimates")
    zv_est = np.asarray(study.zv_estimates[degree][:, parameter], dtype=float)
    R = ord_est.size
    if R < 2:
        raise ValueError(f"need at least 2 replications for a variance ratio, got {R}")

    def ratio(o, z):
        vo = o.var(ddof=1)
        vz = z.var(ddof=1)
        return np.inf if vz == 0.0 else vo / vz

    point = ratio(ord_est, zv_est)
    if R < MIN_INTERVAL_REPLICATIONS:
        return RatioReport(
            point=float(point),
            lower=float("nan"),
            upper=float("nan"),
            resamples=0,
            method="point-only",
            infinite=bool(np.isinf(point)),
        )
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, R, size=(resamples, R))
    o = ord_est[idx]
    z = zv_est[idx]
    vo = o.var(axis=1, ddof=1)
    vz = z.var(axis=1, ddof=1)
    with np.errstate(divide="ignore"):
        ratios = np.where(vz == 0.0, np.inf, vo / np.where(vz == 0.0, 1.0, vz))
    # order statistics, not interpolation: resampled ratios can be inf when a
    # control variate is exact, and interpolating across inf would give nan
    lower = np.percentile(ratios, 2.5, method="lower")
    upper = np.percentile(ratios, 97.5, method="higher")
    # the point estimate is itself a member of the bootstrap distribution;
    # widen the interval in the rare resampling runs that leave it outside
    lower = min(float(lower), float(point))
    upper = max(float(upper), float(point))
    return RatioReport(
        point=float(point),
        lower=float(lower),
        upper=float(upper),
        resamples=resamples,
        method="paired-percentile-bootstrap",
        infinite=bool(np.isinf(point)),
    )


# ---------------------------------------------------------------------------
# control variate sanity checks


@dataclass(frozen=True)
class ZeroMeanReport:
    """Per-column z-scores of mean(g) against its batch-means standard error."""

    z_scores: np.ndarray
    degenerate: np.ndarray
    batch_count: int


MIN_ZERO_MEAN_DRAWS = 1000


def cv_zero_mean_test(cv: ControlVariateMatrix, batch_count: int | None = None) -> ZeroMeanReport:
    """Check that every control variate column averages to zero.

    |z| persistently above about 4 points at a violated unbiasedness condition
    (wrong gradient, unhandled boundary) rather than bad luck.  Degenerate
    (constant) columns get NaN and a flag instead of a z-score.
    """
    G = cv.values
    N, K = G.shape
    if N < MIN_ZERO_MEAN_DRAWS:
        raise ValueError(f"need at least {MIN_ZERO_MEAN_DRAWS} draws, got {N}")
    bc = batch_count if batch_count is not None else _default_batch_count(N)
    z = np.empty(K)
    degenerate = np.zeros(K, dtype=bool)
    for k in range(K):
        col = G[:, k]
        if col.var() <= DEGENERATE_REL_TOL * np.mean(col * col):
            degenerate[k] = True
            z[k] = np.nan
            continue
        asvar = batch_means_asvar(col, bc)
        if asvar == 0.0:
            degenerate[k] = True
            z[k] = np.nan
            continue
        z[k] = col.mean() / np.sqrt(asvar / N)
    return ZeroMeanReport(z_scores=z, degenerate=degenerate, batch_count=bc)


def _running_mean_flags(series_matrix):
    """Stability heuristic per column of an (N, K) matrix.

    Divergent when the running mean over the second half of the chain exceeds
    twice the median of the whole running-mean trace.  Advisory only.
    """
    N = series_matrix.shape[0]
    counts = np.arange(1, N + 1)[:, None]
    running = np.cumsum(series_matrix, axis=0) / counts
    median = np.median(running, axis=0)
    tail_max = running[N // 2 :].max(axis=0)
    return running, tail_max > 2.0 * median


def _thin_indices(n, points):
    step = max(1, n // points)
    idx = np.arange(0, n, step)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    return idx


@dataclass(frozen=True)
class LinnikReport:
    """Mean squared gradient per coordinate with divergence flags.

    estimates targets E_pi[(d log pi / dx_j)^2], which is finite only when
    the target has enough tail regularity; divergent marks coordinates whose
    running mean fails the stability heuristic.  trace holds a thinned
    running-mean trace at trace_indices for inspection.
    """

    estimates: np.ndarray
    divergent: np.ndarray
    trace: np.ndarray
    trace_indices: np.ndarray


def linnik_estimate(chain: ChainOutput, trace_points: int = 512) -> LinnikReport:
    sq = chain.gradients**2
    running, divergent = _running_mean_flags(sq)
    idx = _thin_indices(sq.shape[0], trace_points)
    return LinnikReport(
        estimates=running[-1].copy(),
        divergent=divergent,
        trace=running[idx].copy(),
        trace_indices=idx,
    )


@dataclass(frozen=True)
class MomentReport:
    """Running means of |g|^(2+delta) per control variate column."""

    means: np.ndarray
    stable: np.ndarray
    delta: float


def moment_diagnostic(cv: ControlVariateMatrix, delta: float = 0.5) -> MomentReport:
    """Check the 2+delta moments that variance-ratio asymptotics lean on.

    A column whose running mean of |g|^(2+delta) keeps drifting signals that
    the CLT behind the ratio intervals is on thin ice for this target.
    """
    if not (np.isfinite(delta) and delta > 0.0):
        raise ValueError(f"delta must be finite and > 0, got {delta}")
    series = np.abs(cv.values) ** (2.0 + delta)
    running, divergent = _running_mean_flags(series)
    return MomentReport(means=running[-1].copy(), stable=~divergent, delta=delta)


# ---------------------------------------------------------------------------
# long reference chain


@dataclass(frozen=True)
class ReferenceReport:
    """Point estimates and 95% batch-means intervals from one long chain."""

    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    length: int
    asvar: np.ndarray


def long_chain_reference(
    model,
    length: int,
    seed: int,
    method: str = "rwmh",
    burn_in: int = 1000,
    proposal_sd=None,
    batch_count: int | None = None,
    chain: ChainOutput | None = None,
) -> ReferenceReport:
    """Ordinary estimates of all coordinate means from one long chain.

    Pass chain to reuse an already sampled chain; otherwise one is drawn with
    the given method and seed.  Intervals are mean +- 1.96 sqrt(asvar/N).
    """
    if chain is None:
        config = SamplerConfig(length=length, burn_in=burn_in, seed=seed,
                               proposal_sd=proposal_sd, compute_gradients=False)
        chain = sample_chain(model, config, method=method)
    N, d = chain.draws.shape
    bc = batch_count if batch_count is not None else _default_batch_count(N)
    point = chain.draws.mean(axis=0)
    asvar = np.array([batch_means_asvar(chain.draws[:, j], bc) for j in range(d)])
    half = 1.96 * np.sqrt(asvar / N)
    return ReferenceReport(
        point=point,
        lower=point - half,
        upper=point + half,
        length=N,
        asvar=asvar,
    )
