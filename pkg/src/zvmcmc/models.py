"""Target distributions exposing unnormalized log-density and its gradient.

Toy 1-d targets (gaussian, exponential, gamma) and three Bayesian posteriors
(probit, logit, GARCH(1,1)) share one interface:

    dimension, tag, parameter_names, constrained_coordinates
    in_support(beta) -> bool
    log_density(beta) -> float        (additive constants dropped consistently)
    grad_log_density(beta) -> (d,)    (beta strictly interior to the support)
    rough_scale() -> (d,)             (crude posterior scale, proposal sizing)
    default_init() -> (d,)
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.special import expit, log_ndtr

__all__ = [
    "SupportError",
    "BinaryRegressionData",
    "ReturnsSeries",
    "GarchPrior",
    "GaussianTarget",
    "ExponentialTarget",
    "GammaTarget",
    "ProbitTarget",
    "LogitTarget",
    "GarchTarget",
    "garch_variance_path",
    "garch_h_derivatives",
]

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class SupportError(ValueError):
    """A parameter value violates a target's support constraints."""


def _as_param(beta, d):
    beta = np.asarray(beta, dtype=float)
    if beta.shape == () and d == 1:
        beta = beta.reshape(1)
    if beta.shape != (d,):
        raise ValueError(f"parameter must have shape ({d},), got {beta.shape}")
    return beta


def _log_normal_pdf(t):
    return -0.5 * t * t - _LOG_SQRT_2PI


# ---------------------------------------------------------------------------
# data containers


@dataclass(frozen=True)
class BinaryRegressionData:
    """Design matrix (n, d) and 0/1 response (n,) for probit and logit."""

    design: np.ndarray
    response: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.design, dtype=float)
        y = np.asarray(self.response, dtype=float)
        if X.ndim != 2:
            raise ValueError("design must be a 2-d array")
        n, d = X.shape
        if d < 1 or n < d:
            raise ValueError(f"need at least as many rows as columns, got {n} rows, {d} columns")
        if not np.all(np.isfinite(X)):
            raise ValueError("design contains non-finite entries")
        if y.shape != (n,):
            raise ValueError(f"response must have shape ({n},), got {y.shape}")
        if not np.all((y == 0.0) | (y == 1.0)):
            bad = int(np.flatnonzero(~((y == 0.0) | (y == 1.0)))[0])
            raise ValueError(f"response must be 0 or 1, offending row {bad}")
        zero_rows = np.flatnonzero(~np.any(X != 0.0, axis=1))
        if zero_rows.size:
            raise ValueError(f"design row {int(zero_rows[0])} is all zeros")
        if np.linalg.matrix_rank(X) < d:
            raise ValueError("design is rank deficient")
        X = X.copy()
        y = y.copy()
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "design", X)
        object.__setattr__(self, "response", y)

    @property
    def n(self):
        return self.design.shape[0]

    @property
    def dimension(self):
        return self.design.shape[1]


@dataclass(frozen=True)
class ReturnsSeries:
    """Return series with the pre-sample variance seed h0 for the GARCH recursion."""

    returns: np.ndarray
    h0: float

    def __post_init__(self):
        r = np.asarray(self.returns, dtype=float)
        if r.ndim != 1 or r.size < 2:
            raise ValueError("returns must be a 1-d array with at least 2 entries")
        if not np.all(np.isfinite(r)):
            raise ValueError("returns contain non-finite entries")
        if not (np.isfinite(self.h0) and self.h0 > 0.0):
            raise ValueError(f"h0 must be finite and > 0, got {self.h0}")
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "returns", r)
        object.__setattr__(self, "h0", float(self.h0))

    @property
    def length(self):
        return self.returns.size


@dataclass(frozen=True)
class GarchPrior:
    """Independent half-open truncated normal priors on (omega_1, omega_2, omega_3).

    Only the standard deviations enter; the truncation normalizer is constant
    in omega and dropped from the log-density.
    """

    prior_sd: np.ndarray = field(default_factory=lambda: np.array([1000.0, 1000.0, 1000.0]))

    def __post_init__(self):
        sd = np.asarray(self.prior_sd, dtype=float)
        if sd.shape != (3,):
            raise ValueError(f"prior_sd must have shape (3,), got {sd.shape}")
        if not np.all(np.isfinite(sd) & (sd > 0.0)):
            raise ValueError("prior_sd entries must be finite and > 0")
        sd = sd.copy()
        sd.setflags(write=False)
        object.__setattr__(self, "prior_sd", sd)


# ---------------------------------------------------------------------------
# toy targets


class GaussianTarget:
    """1-d normal with mean mu and variance sigma2, log pi = -(x-mu)^2/(2 sigma2)."""

    tag = "gaussian"
    dimension = 1
    parameter_names = ("x",)
    constrained_coordinates = ()

    def __init__(self, mu=0.0, sigma2=1.0):
        if not (np.isfinite(sigma2) and sigma2 > 0.0):
            raise ValueError(f"sigma2 must be finite and > 0, got {sigma2}")
        self.mu = float(mu)
        self.sigma2 = float(sigma2)

    def _violation(self, beta):
        if not np.all(np.isfinite(beta)):
            return "parameter must be finite"
        return None

    def in_support(self, beta):
        return self._violation(_as_param(beta, 1)) is None

    def log_density(self, beta):
        beta = _require_interior(self, beta)
        d = beta[0] - self.mu
        return float(-0.5 * d * d / self.sigma2)

    def grad_log_density(self, beta):
        beta = _require_interior(self, beta)
        return np.array([(self.mu - beta[0]) / self.sigma2])

    def rough_scale(self):
        return np.array([np.sqrt(self.sigma2)])

    def default_init(self):
        return np.array([self.mu])


class ExponentialTarget:
    """Exponential(lambda) on (0, inf), unnormalized log pi = -lambda x."""

    tag = "exponential"
    dimension = 1
    parameter_names = ("x",)
    # plain x is excluded from the default basis: the density is positive at
    # the boundary x = 0, so the linear control variate picks up a boundary
    # term and its population mean is not zero
    constrained_coordinates = (0,)

    def __init__(self, lam=1.0):
        if not (np.isfinite(lam) and lam > 0.0):
            raise ValueError(f"lam must be finite and > 0, got {lam}")
        self.lam = float(lam)

    def _violation(self, beta):
        if not np.all(np.isfinite(beta)):
            return "parameter must be finite"
        if beta[0] <= 0.0:
            return "x must be > 0"
        return None

    def in_support(self, beta):
        return self._violation(_as_param(beta, 1)) is None

    def log_density(self, beta):
        beta = _require_interior(self, beta)
        return float(-self.lam * beta[0])

    def grad_log_density(self, beta):
        beta = _require_interior(self, beta)
        return np.array([-self.lam])

    def rough_scale(self):
        return np.array([1.0 / self.lam])

    def default_init(self):
        return np.array([1.0 / self.lam])


class GammaTarget:
    """Gamma(shape, scale) on (0, inf), log pi = (shape-1) log x - x/scale."""

    tag = "gamma"
    dimension = 1
    parameter_names = ("x",)
    constrained_coordinates = (0,)

    def __init__(self, shape=3.0, scale=1.0):
        if not (np.isfinite(shape) and shape > 0.0):
            raise ValueError(f"shape must be finite and > 0, got {shape}")
        if not (np.isfinite(scale) and scale > 0.0):
            raise ValueError(f"scale must be finite and > 0, got {scale}")
        self.shape = float(shape)
        self.scale = float(scale)

    def _violation(self, beta):
        if not np.all(np.isfinite(beta)):
            return "parameter must be finite"
        if beta[0] <= 0.0:
            return "x must be > 0"
        return None

    def in_support(self, beta):
        return self._violation(_as_param(beta, 1)) is None

    def log_density(self, beta):
        beta = _require_interior(self, beta)
        x = beta[0]
        return float((self.shape - 1.0) * np.log(x) - x / self.scale)

    def grad_log_density(self, beta):
        beta = _require_interior(self, beta)
        x = beta[0]
        return np.array([(self.shape - 1.0) / x - 1.0 / self.scale])

    def rough_scale(self):
        return np.array([np.sqrt(self.shape) * self.scale])

    def default_init(self):
        return np.array([self.shape * self.scale])


# ---------------------------------------------------------------------------
# regression posteriors, flat prior on the coefficients


class _RegressionTarget:
    constrained_coordinates = ()

    def __init__(self, data: BinaryRegressionData):
        self.data = data
        self.dimension = data.dimension
        self.parameter_names = tuple(f"beta_{j + 1}" for j in range(self.dimension))
        xtx = data.design.T @ data.design
        self._xtx_inv = np.linalg.inv(xtx)

    def _violation(self, beta):
        if not np.all(np.isfinite(beta)):
            return "parameter must be finite"
        return None

    def in_support(self, beta):
        return self._violation(_as_param(beta, self.dimension)) is None

    def default_init(self):
        return np.zeros(self.dimension)


class ProbitTarget(_RegressionTarget):
    """Bayesian probit regression, flat prior.

    log pi(beta) = sum_i [ y_i log Phi(x_i'beta) + (1-y_i) log Phi(-x_i'beta) ].
    """

    tag = "probit"

    def log_density(self, beta):
        beta = _require_interior(self, beta)
        t = self.data.design @ beta
        y = self.data.response
        return float(y @ log_ndtr(t) + (1.0 - y) @ log_ndtr(-t))

    def grad_log_density(self, beta):
        beta = _require_interior(self, beta)
        t = self.data.design @ beta
        y = self.data.response
        lpdf = _log_normal_pdf(t)
        # phi/Phi in log space stays finite deep in both tails
        ratio_pos = np.exp(lpdf - log_ndtr(t))
        ratio_neg = np.exp(lpdf - log_ndtr(-t))
        return self.data.design.T @ (y * ratio_pos - (1.0 - y) * ratio_neg)

    def rough_scale(self):
        return np.sqrt(np.diag(self._xtx_inv))


class LogitTarget(_RegressionTarget):
    """Bayesian logistic regression, flat prior.

    log pi(beta) = sum_i [ y_i x_i'beta - log(1 + exp(x_i'beta)) ].
    """

    tag = "logit"

    def log_density(self, beta):
        beta = _require_interior(self, beta)
        t = self.data.design @ beta
        y = self.data.response
        return float(y @ t - np.sum(np.logaddexp(0.0, t)))

    def grad_log_density(self, beta):
        beta = _require_interior(self, beta)
        t = self.data.design @ beta
        return self.data.design.T @ (self.data.response - expit(t))

    def rough_scale(self):
        # logistic noise is wider than probit by about pi/sqrt(3)
        return 1.8 * np.sqrt(np.diag(self._xtx_inv))


# ---------------------------------------------------------------------------
# GARCH(1,1)


class GarchTarget:
    """GARCH(1,1) posterior for omega = (omega_1, omega_2, omega_3).

    Conditional variances follow
        h_t = omega_1 + omega_3 h_{t-1} + omega_2 r_{t-1}^2,
    seeded with h_0 = series.h0 and r_0 = 0, so h_1 = omega_1 + omega_3 h_0.
    The likelihood is the Gaussian one over all T returns, the prior the
    product of truncated normals from GarchPrior.  Support: omega_1 > 0,
    omega_2 >= 0, omega_3 >= 0.
    """

    tag = "garch"
    dimension = 3
    parameter_names = ("omega_1", "omega_2", "omega_3")
    constrained_coordinates = ()

    def __init__(self, series: ReturnsSeries, prior: GarchPrior | None = None):
        self.series = series
        self.prior = prior if prior is not None else GarchPrior()
        self._prior_var = self.prior.prior_sd**2
        self._r2 = series.returns**2
        # r_0 := 0 puts a zero in front of the lagged squared returns
        self._r2_lag = np.concatenate(([0.0], self._r2[:-1]))

    def _violation(self, omega):
        if not np.all(np.isfinite(omega)):
            return "parameter must be finite"
        if omega[0] <= 0.0:
            return "omega_1 must be > 0"
        if omega[1] < 0.0:
            return "omega_2 must be >= 0"
        if omega[2] < 0.0:
            return "omega_3 must be >= 0"
        return None

    def in_support(self, omega):
        return self._violation(_as_param(omega, 3)) is None

    def _interior_violation(self, omega):
        v = self._violation(omega)
        if v is not None:
            return v
        if omega[1] == 0.0:
            return "omega_2 must be > 0 strictly inside the support"
        if omega[2] == 0.0:
            return "omega_3 must be > 0 strictly inside the support"
        return None

    def _h_path(self, omega):
        forcing = omega[0] + omega[1] * self._r2_lag
        h, _ = lfilter([1.0], [1.0, -omega[2]], forcing, zi=[omega[2] * self.series.h0])
        return h

    def log_density(self, omega):
        omega = _require_interior(self, omega)
        h = self._h_path(omega)
        loglik = -0.5 * float(np.sum(np.log(h) + self._r2 / h))
        logprior = -0.5 * float(np.sum(omega * omega / self._prior_var))
        return loglik + logprior

    def grad_log_density(self, omega):
        omega = _as_param(omega, 3)
        v = self._interior_violation(omega)
        if v is not None:
            raise SupportError(v)
        h = self._h_path(omega)
        dh = _h_derivatives(self, omega, h)
        w = 0.5 * (self._r2 / (h * h) - 1.0 / h)
        return -omega / self._prior_var + dh.T @ w

    def rough_scale(self):
        # crude, order of magnitude only; shipped configs override proposals
        return np.array([0.05 * self.series.h0, 0.1, 0.1])

    def default_init(self):
        return np.array([0.2 * self.series.h0, 0.1, 0.6])


def _h_derivatives(model, omega, h):
    w3 = omega[2]
    T = h.size
    dh = np.empty((T, 3))
    # each recursion d_t = forcing_t + omega_3 d_{t-1} starts from d_0 = 0
    # because h_0 is a data constant; the omega_3 forcing still sees h_0
    dh[:, 0], _ = lfilter([1.0], [1.0, -w3], np.ones(T), zi=[0.0])
    dh[:, 1], _ = lfilter([1.0], [1.0, -w3], model._r2_lag, zi=[0.0])
    h_lag = np.concatenate(([model.series.h0], h[:-1]))
    dh[:, 2], _ = lfilter([1.0], [1.0, -w3], h_lag, zi=[0.0])
    return dh


def garch_variance_path(series: ReturnsSeries, omega) -> np.ndarray:
    """Conditional variance path h_1..h_T for the given omega.

    Raises SupportError outside {omega_1 > 0, omega_2 >= 0, omega_3 >= 0}.
    """
    model = GarchTarget(series)
    omega = _as_param(omega, 3)
    v = model._violation(omega)
    if v is not None:
        raise SupportError(v)
    return model._h_path(omega)


def garch_h_derivatives(series: ReturnsSeries, omega) -> np.ndarray:
    """(T, 3) array of dh_t/domega_i under the same seed convention as the path.

    With h_1 = omega_1 + omega_3 h_0 (r_0 = 0) the first row is (1, 0, h0) and
    dh_t/domega_1 sums the geometric series (1 - omega_3^t)/(1 - omega_3).
    """
    model = GarchTarget(series)
    omega = _as_param(omega, 3)
    v = model._violation(omega)
    if v is not None:
        raise SupportError(v)
    return _h_derivatives(model, omega, model._h_path(omega))


def _require_interior(model, beta):
    beta = _as_param(beta, model.dimension)
    v = model._violation(beta)
    if v is not None:
        raise SupportError(v)
    return beta
