"""Samplers producing chains with cached log-density gradients.

Every retained draw carries grad log pi evaluated at that draw, so the
control variate stage never re-touches the model.  All randomness flows
through a numpy Generator seeded from SamplerConfig.seed; identical
configs give bit-identical output.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri, ndtri_exp

from .models import BinaryRegressionData, ProbitTarget, SupportError

__all__ = [
    "SamplerConfig",
    "ChainOutput",
    "truncated_normal_draw",
    "rw_metropolis",
    "gibbs_probit",
    "sample_chain",
]

_PILOT_STEPS = 500


@dataclass
class SamplerConfig:
    """Chain length bookkeeping.

    length    retained draws after burn-in and thinning, >= 1
    burn_in   discarded initial steps, >= 0
    seed      u64 seed for the Generator stream
    init      starting point, model.default_init() when None
    proposal_sd  per-coordinate random walk step, scalar or (d,);
                 None means 2.4/sqrt(d) times model.rough_scale()
    thin      keep every thin-th post-burn-in step; the chain advances
              burn_in + length * thin steps in total
    compute_gradients  False skips gradient evaluation (the output then
              cannot feed the control variate stage)
    """

    length: int
    burn_in: int = 0
    seed: int = 0
    init: np.ndarray | None = None
    proposal_sd: np.ndarray | float | None = None
    thin: int = 1
    compute_gradients: bool = True

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 1:
            raise ValueError(f"length must be an integer >= 1, got {self.length}")
        if int(self.burn_in) != self.burn_in or self.burn_in < 0:
            raise ValueError(f"burn_in must be an integer >= 0, got {self.burn_in}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a u64, got {self.seed}")
        if int(self.thin) != self.thin or self.thin < 1:
            raise ValueError(f"thin must be an integer >= 1, got {self.thin}")
        self.length = int(self.length)
        self.burn_in = int(self.burn_in)
        self.seed = int(self.seed)
        self.thin = int(self.thin)


@dataclass(frozen=True)
class ChainOutput:
    """Immutable chain: draws (N, d), gradients (N, d) aligned row by row.

    A chain sampled with compute_gradients=False carries a (0, d) gradients
    array; has_gradients distinguishes the two.
    """

    draws: np.ndarray
    gradients: np.ndarray
    accept_rate: float
    seed_used: int
    model_tag: str
    pilot_accept_rate: float | None = None

    def __post_init__(self):
        self.draws.setflags(write=False)
        self.gradients.setflags(write=False)

    @property
    def length(self):
        return self.draws.shape[0]

    @property
    def dimension(self):
        return self.draws.shape[1]

    @property
    def has_gradients(self):
        return self.gradients.shape[0] == self.draws.shape[0]


# ---------------------------------------------------------------------------
# truncated normal


def _std_lower(a, u):
    # quantile of a standard normal conditioned on (a, inf); computed through
    # the survival function in log space so bounds far beyond 5 sd stay exact
    return -ndtri_exp(log_ndtr(-a) + np.log1p(-u))


def _std_two_sided(a, b, u):
    if a >= 0.0:
        la = log_ndtr(-a)
        lb = log_ndtr(-b)
        return -ndtri_exp(la + np.log1p(-u * (-np.expm1(lb - la))))
    if b <= 0.0:
        return -_std_two_sided(-b, -a, 1.0 - u)
    q = ndtr(a) + u * (ndtr(b) - ndtr(a))
    return ndtri(min(q, np.nextafter(1.0, 0.0)))


def truncated_normal_draw(mean, sd, lower, upper, rng) -> float:
    """One draw from N(mean, sd^2) restricted to (lower, upper).

    Inverse-CDF in the numerically stable tail, so one-sided bounds tens of
    standard deviations out are handled without rejection loops.
    """
    if not (np.isfinite(mean) and np.isfinite(sd) and sd > 0.0):
        raise ValueError(f"need finite mean and sd > 0, got mean={mean}, sd={sd}")
    if not lower < upper:
        raise ValueError(f"need lower < upper, got [{lower}, {upper}]")
    a = (lower - mean) / sd
    b = (upper - mean) / sd
    while True:
        u = rng.random()
        if a == -np.inf and b == np.inf:
            z = rng.standard_normal()
        elif b == np.inf:
            z = _std_lower(a, u)
        elif a == -np.inf:
            z = -_std_lower(-b, u)
        else:
            z = _std_two_sided(a, b, u)
        value = mean + sd * z
        # u == 0 can land exactly on a bound; the interval is open
        if lower < value < upper:
            return float(value)


# ---------------------------------------------------------------------------
# random walk Metropolis-Hastings


def _resolve_proposal_sd(model, config):
    if config.proposal_sd is None:
        sd = (2.4 / np.sqrt(model.dimension)) * model.rough_scale()
    else:
        sd = np.broadcast_to(np.asarray(config.proposal_sd, dtype=float), (model.dimension,)).copy()
    if not np.all(np.isfinite(sd) & (sd > 0.0)):
        raise ValueError(f"proposal_sd must be finite and > 0, got {sd}")
    return sd


def _resolve_init(model, config):
    init = config.init if config.init is not None else model.default_init()
    init = np.asarray(init, dtype=float)
    if init.shape != (model.dimension,):
        raise ValueError(f"init must have shape ({model.dimension},), got {init.shape}")
    if not model.in_support(init):
        raise SupportError(f"init {init} is outside the support of {model.tag}")
    return init


def rw_metropolis(model, config: SamplerConfig) -> ChainOutput:
    """Gaussian random walk Metropolis-Hastings on the model's support.

    Proposals outside the support, or with log-density underflowing to -inf,
    are rejected; NaN log-density is fatal.  The acceptance rate is measured
    over the retained phase, the first min(500, burn_in) steps double as a
    reporting-only pilot.
    """
    rng = np.random.default_rng(config.seed)
    d = model.dimension
    sd = _resolve_proposal_sd(model, config)
    x = _resolve_init(model, config)
    logp = model.log_density(x)
    if not np.isfinite(logp):
        raise FloatingPointError(f"non-finite log-density {logp} at init {x}")

    draws = np.empty((config.length, d))
    grads = np.empty((config.length if config.compute_gradients else 0, d))
    grad_cache = None
    pilot_steps = min(_PILOT_STEPS, config.burn_in)
    pilot_accepts = 0
    retained_accepts = 0
    retained_steps = config.length * config.thin
    total = config.burn_in + retained_steps

    for step in range(total):
        prop = x + sd * rng.standard_normal(d)
        accept = False
        if model.in_support(prop):
            lp = model.log_density(prop)
            if np.isnan(lp):
                raise FloatingPointError(f"NaN log-density at proposal {prop}")
            delta = lp - logp
            if delta >= 0.0:
                accept = True
            elif delta > -np.inf:
                accept = np.log(rng.random()) < delta
        if accept:
            x = prop
            logp = lp
            grad_cache = None
            if step < pilot_steps:
                pilot_accepts += 1
            if step >= config.burn_in:
                retained_accepts += 1
        offset = step - config.burn_in
        if offset >= 0 and offset % config.thin == 0:
            i = offset // config.thin
            draws[i] = x
            if config.compute_gradients:
                if grad_cache is None:
                    grad_cache = model.grad_log_density(x)
                grads[i] = grad_cache

    return ChainOutput(
        draws=draws,
        gradients=grads,
        accept_rate=retained_accepts / retained_steps,
        seed_used=config.seed,
        model_tag=model.tag,
        pilot_accept_rate=(pilot_accepts / pilot_steps) if pilot_steps else None,
    )


# ---------------------------------------------------------------------------
# probit Gibbs (latent variable data augmentation)


def gibbs_probit(data: BinaryRegressionData, config: SamplerConfig) -> ChainOutput:
    """Gibbs sampler for the flat-prior probit posterior.

    Latent u_i ~ N(x_i'beta, 1) truncated to (0, inf) when y_i = 1 and to
    (-inf, 0) when y_i = 0, then beta ~ N((X'X)^{-1} X'u, (X'X)^{-1}).
    Gradients of the probit log-posterior are cached per retained sweep.
    """
    if config.proposal_sd is not None:
        raise ValueError("gibbs_probit does not take a proposal_sd")
    model = ProbitTarget(data)
    rng = np.random.default_rng(config.seed)
    X = data.design
    y = data.response
    n, d = X.shape
    xtx = X.T @ X
    try:
        np.linalg.cholesky(xtx)
    except np.linalg.LinAlgError:
        raise ValueError("design is numerically rank deficient") from None
    xtx_inv = np.linalg.inv(xtx)
    proj = xtx_inv @ X.T
    chol_cov = np.linalg.cholesky(xtx_inv)
    # y = 1 truncates the latent below at 0, y = 0 above at 0
    sign = np.where(y == 1.0, 1.0, -1.0)

    beta = _resolve_init(model, config)
    draws = np.empty((config.length, d))
    grads = np.empty((config.length if config.compute_gradients else 0, d))

    for step in range(config.burn_in + config.length * config.thin):
        t = X @ beta
        u = rng.random(n)
        latent = t + sign * _std_lower(-sign * t, u)
        mean = proj @ latent
        beta = mean + chol_cov @ rng.standard_normal(d)
        offset = step - config.burn_in
        if offset >= 0 and offset % config.thin == 0:
            i = offset // config.thin
            draws[i] = beta
            if config.compute_gradients:
                grads[i] = model.grad_log_density(beta)

    return ChainOutput(
        draws=draws,
        gradients=grads,
        accept_rate=1.0,
        seed_used=config.seed,
        model_tag=model.tag,
        pilot_accept_rate=None,
    )


def sample_chain(model, config: SamplerConfig, method: str = "rwmh") -> ChainOutput:
    """Dispatch on sampler method; "gibbs" is probit only."""
    if method == "rwmh":
        return rw_metropolis(model, config)
    if method == "gibbs":
        if model.tag != "probit":
            raise ValueError(f"gibbs sampling is implemented for probit only, got {model.tag}")
        return gibbs_probit(model.data, config)
    raise ValueError(f"unknown sampler method {method!r}, expected 'rwmh' or 'gibbs'")
