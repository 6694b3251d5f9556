"""Shared oracles for the test suite.

Everything here is deliberately independent of the package internals: finite
differences instead of analytic gradients, quadrature instead of sampling,
explicit loops instead of vectorized identities.
"""

import numpy as np
from scipy import integrate


def fd_gradient(fn, x, rel_h=1e-5):
    """Central finite-difference gradient with per-coordinate relative step.

    The absolute floor keeps the step nonzero at the origin; the relative part
    keeps it small next to support boundaries at tiny coordinate scales.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for j in range(x.size):
        h = rel_h * abs(x[j]) + 1e-8
        hi = x.copy()
        lo = x.copy()
        hi[j] += h
        lo[j] -= h
        out[j] = (fn(hi) - fn(lo)) / (2.0 * h)
    return out


def quad_expectation(integrand, log_density, lo, hi):
    """E[integrand(x)] under the density exp(log_density) on (lo, hi).

    Normalizes explicitly so the oracle works for unnormalized targets.
    """

    def w(x):
        return np.exp(log_density(np.array([x])))

    z, _ = integrate.quad(w, lo, hi, limit=200)
    num, _ = integrate.quad(lambda x: integrand(x) * w(x), lo, hi, limit=200)
    return num / z


def ar1_series(rho, sigma, length, seed):
    """Stationary AR(1) draws; asymptotic variance sigma^2 (1+rho)/(1-rho)."""
    rng = np.random.default_rng(seed)
    innov_sd = sigma * np.sqrt(1.0 - rho * rho)
    x = np.empty(length)
    x[0] = rng.normal(0.0, sigma)
    for t in range(1, length):
        x[t] = rho * x[t - 1] + rng.normal(0.0, innov_sd)
    return x


def hand_control_variate(alpha, x, z):
    """Single-monomial control variate evaluated by the defining sum.

    alpha is the exponent vector, x one draw, z = -grad(log pi)/2 at x.
    Written as the literal formula, term by term, as an oracle for the
    vectorized implementation.
    """
    alpha = np.asarray(alpha, dtype=int)
    x = np.asarray(x, dtype=float)
    total = 0.0
    for j in range(alpha.size):
        if alpha[j] == 0:
            continue
        down = alpha.copy()
        down[j] -= 1
        total += alpha[j] * np.prod(x**down) * z[j]
        if alpha[j] >= 2:
            down2 = alpha.copy()
            down2[j] -= 2
            total -= 0.5 * alpha[j] * (alpha[j] - 1) * np.prod(x**down2)
    return total
