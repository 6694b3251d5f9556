"""Polynomial control variates and the zero-variance estimator.

For a monomial m(x) the control variate is

    g(x) = -0.5 * laplacian(m)(x) + grad(m)(x) . z(x),   z = -0.5 grad log pi,

which has zero mean under pi whenever the boundary terms of the integration
by parts vanish.  Coefficients a = -Sigma_gg^{-1} sigma_gf are estimated
from centered sample moments (sample covariances), and the renormalized
function is

    ftilde = f + G a.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .samplers import ChainOutput

__all__ = [
    "InsufficientSampleError",
    "MonomialBasis",
    "ControlVariateMatrix",
    "ZVFit",
    "ZvResult",
    "monomial_basis",
    "default_exclusions",
    "standardization_from_chain",
    "eval_control_variates",
    "fit_coefficients",
    "renormalize",
    "zv_estimate",
]

SUPPORTED_DEGREES = (1, 2, 3)
DEGENERATE_REL_TOL = 1e-12
CONDITION_LIMIT = 1e10
RIDGE_REL = 1e-10


class InsufficientSampleError(RuntimeError):
    """Fewer draws than active control variates, the moment system is singular."""


@dataclass(frozen=True)
class MonomialBasis:
    """Multi-index basis in graded lexicographic order.

    exponents holds every multi-index with 1 <= |alpha| <= degree; excluded
    lists the ones removed for unbiasedness.  The active tuple (their
    difference, order preserved) indexes the control variate columns.
    """

    dimension: int
    degree: int
    exponents: tuple[tuple[int, ...], ...]
    excluded: tuple[tuple[int, ...], ...]

    @property
    def active(self) -> tuple[tuple[int, ...], ...]:
        return tuple(a for a in self.exponents if a not in self.excluded)

    @property
    def size(self) -> int:
        return len(self.exponents) - len(self.excluded)


def _compositions(d, total):
    # lexicographically descending within one grade
    if d == 1:
        yield (total,)
        return
    for k in range(total, -1, -1):
        for rest in _compositions(d - 1, total - k):
            yield (k,) + rest


def monomial_basis(dimension: int, degree: int, exclusions=()) -> MonomialBasis:
    """All monomials of total degree 1..degree in the stated order.

    The full basis has C(dimension + degree, dimension) - 1 elements before
    exclusions.  Each exclusion must name an exponent tuple that exists.
    """
    if int(dimension) != dimension or dimension < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {dimension}")
    if degree not in SUPPORTED_DEGREES:
        raise ValueError(f"degree must be one of {SUPPORTED_DEGREES}, got {degree}")
    dimension = int(dimension)
    exponents = tuple(
        alpha for total in range(1, degree + 1) for alpha in _compositions(dimension, total)
    )
    seen = set()
    cleaned = []
    for e in exclusions:
        e = tuple(int(k) for k in e)
        if e not in exponents:
            raise ValueError(f"exclusion {e} is not a basis exponent for d={dimension}, p={degree}")
        if e not in seen:
            seen.add(e)
            cleaned.append(e)
    return MonomialBasis(dimension, degree, exponents, tuple(cleaned))


def default_exclusions(model) -> tuple[tuple[int, ...], ...]:
    """Pure first-degree monomials dropped for boundary-constrained coordinates.

    One-sided supports with positive density at the boundary (exponential,
    gamma) leak a boundary term through the linear monomial, so models flag
    those coordinates and everything else keeps the full basis.
    """
    d = model.dimension
    out = []
    for j in model.constrained_coordinates:
        alpha = [0] * d
        alpha[j] = 1
        out.append(tuple(alpha))
    return tuple(out)


def control_variate_z(gradient) -> np.ndarray:
    """z = -0.5 * grad log pi, the building block of every control variate.

    For a linear monomial the control variate IS z_j, so this vector doubles
    as a convergence monitor: its components have exactly zero mean under the
    target whenever the unbiasedness conditions hold.
    """
    g = np.asarray(gradient, dtype=float)
    if not np.all(np.isfinite(g)):
        raise ValueError("gradient must be finite")
    return -0.5 * g


@dataclass(frozen=True)
class ControlVariateMatrix:
    """Columns of control variate values, one per active basis element.

    center and scale record the affine change of coordinates the monomials
    were built in (None means raw coordinates); a fit is only exchangeable
    between matrices that share them.
    """

    values: np.ndarray
    basis: MonomialBasis
    center: np.ndarray | None = None
    scale: np.ndarray | None = None

    @property
    def draw_count(self):
        return self.values.shape[0]

    @property
    def column_count(self):
        return self.values.shape[1]


def standardization_from_chain(chain: ChainOutput):
    """Per-coordinate center and scale for conditioning the moment system.

    Coordinates with zero sample spread keep scale 1 so constant directions
    stay untouched.
    """
    center = chain.draws.mean(axis=0)
    scale = chain.draws.std(axis=0, ddof=1) if chain.length > 1 else np.ones(chain.dimension)
    scale = np.where(scale > 0.0, scale, 1.0)
    return center, scale


def eval_control_variates(
    chain: ChainOutput, basis: MonomialBasis, center=None, scale=None
) -> ControlVariateMatrix:
    """Evaluate every active control variate on the chain, (N, K).

    With center/scale the monomials are taken in x' = (x - center)/scale and
    the gradient term is rescaled accordingly; that is the same method applied
    to the affinely transformed chain, whose target is the transformed
    density, so every column keeps zero mean while the moment system stays
    far better conditioned when coordinate scales differ wildly.
    """
    if chain.dimension != basis.dimension:
        raise ValueError(
            f"chain dimension {chain.dimension} does not match basis dimension {basis.dimension}"
        )
    if not chain.has_gradients:
        raise ValueError("chain was sampled without gradients; control variates need them")
    X = chain.draws
    Z = -0.5 * chain.gradients
    N, d = X.shape
    if center is not None or scale is not None:
        c = np.zeros(d) if center is None else np.broadcast_to(np.asarray(center, float), (d,))
        s = np.ones(d) if scale is None else np.broadcast_to(np.asarray(scale, float), (d,))
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(s)) and np.all(s > 0.0)):
            raise ValueError("center must be finite and scale finite positive")
        X = (X - c) / s
        # z of the transformed density: z'_j = scale_j * z_j
        Z = Z * s
        center, scale = c.copy(), s.copy()
    # powers 0..degree per coordinate, reused across columns
    pw = [[np.ones(N)] for _ in range(d)]
    for j in range(d):
        for k in range(basis.degree):
            pw[j].append(pw[j][k] * X[:, j])

    active = basis.active
    G = np.empty((N, len(active)))
    for col, alpha in enumerate(active):
        nz = [j for j in range(d) if alpha[j] > 0]
        acc = np.zeros(N)
        for j in nz:
            prod = Z[:, j].copy()
            for k in nz:
                prod *= pw[k][alpha[k] - (1 if k == j else 0)]
            acc += alpha[j] * prod
            if alpha[j] >= 2:
                prod2 = np.full(N, -0.5 * alpha[j] * (alpha[j] - 1))
                for k in nz:
                    prod2 *= pw[k][alpha[k] - (2 if k == j else 0)]
                acc += prod2
        G[:, col] = acc
    return ControlVariateMatrix(values=G, basis=basis, center=center, scale=scale)


@dataclass(frozen=True)
class ZVFit:
    """Fitted coefficients plus the moments and conditioning evidence.

    coefficients has one entry per active basis element, zeros at dropped
    (degenerate) columns.  sigma_gg and sigma_gf hold the centered sample
    moments the solve used.  condition_estimate is the eigenvalue ratio of
    the equilibrated kept block of sigma_gg before any ridge.
    """

    coefficients: np.ndarray
    sigma_gg: np.ndarray
    sigma_gf: np.ndarray
    condition_estimate: float
    dropped_columns: tuple[int, ...]
    ridge_applied: bool = False
    all_degenerate: bool = False


def fit_coefficients(cv: ControlVariateMatrix, f_values) -> ZVFit:
    """Solve a = -Sigma_gg^{-1} sigma_gf from centered sample moments.

    Columns whose sample variance is below DEGENERATE_REL_TOL times their mean
    square are dropped with zero coefficient.  The kept system is equilibrated
    to unit diagonal before solving; equilibration only reorders the floating
    point work and leaves the solution unchanged in exact arithmetic.  A
    condition estimate above CONDITION_LIMIT triggers one ridge refit with
    RIDGE_REL * trace/K on the diagonal, flagged on the result.
    """
    G = cv.values
    f = np.asarray(f_values, dtype=float)
    N, K = G.shape
    if f.shape != (N,):
        raise ValueError(f"f_values must have shape ({N},), got {f.shape}")
    if not np.all(np.isfinite(G)) or not np.all(np.isfinite(f)):
        raise ValueError("control variates and f values must be finite")

    # Centered sample moments.  E[g] = 0 under pi, so covariances and raw
    # second moments agree in population; in finite samples the raw-moment
    # solve lets the regression cancel part of the nonzero mean of f against
    # chance fluctuations of the g means, badly distorting the coefficients.
    g_mean = G.mean(axis=0)
    Gc = G - g_mean
    fc = f - f.mean()
    sigma_gg = (Gc.T @ Gc) / N
    sigma_gg = 0.5 * (sigma_gg + sigma_gg.T)
    sigma_gf = (Gc.T @ fc) / N

    col_var = np.diag(sigma_gg)
    col_msq = (G * G).mean(axis=0)
    dropped = col_var <= DEGENERATE_REL_TOL * col_msq
    keep = ~dropped
    coefficients = np.zeros(K)

    if not keep.any():
        return ZVFit(
            coefficients=coefficients,
            sigma_gg=sigma_gg,
            sigma_gf=sigma_gf,
            condition_estimate=1.0,
            dropped_columns=tuple(int(i) for i in np.flatnonzero(dropped)),
            all_degenerate=True,
        )

    ka = int(keep.sum())
    if N <= ka:
        raise InsufficientSampleError(
            f"{N} draws cannot identify {ka} control variate coefficients"
        )

    S = sigma_gg[np.ix_(keep, keep)]
    s = sigma_gf[keep]
    d = np.sqrt(np.diag(S))
    Se = S / np.outer(d, d)
    se = s / d
    w, V = np.linalg.eigh(Se)
    condition = float(w[-1] / w[0]) if w[0] > 0.0 else np.inf
    ridge_applied = False
    if condition > CONDITION_LIMIT:
        lam = RIDGE_REL * float(np.trace(Se)) / ka
        w = w + lam
        ridge_applied = True
    ae = -V @ ((V.T @ se) / w)
    coefficients[keep] = ae / d

    return ZVFit(
        coefficients=coefficients,
        sigma_gg=sigma_gg,
        sigma_gf=sigma_gf,
        condition_estimate=condition,
        dropped_columns=tuple(int(i) for i in np.flatnonzero(dropped)),
        ridge_applied=ridge_applied,
    )


def renormalize(f_values, cv: ControlVariateMatrix, fit: ZVFit) -> np.ndarray:
    """ftilde = f + G a, same mean as f under pi, hopefully far less variance."""
    f = np.asarray(f_values, dtype=float)
    if f.shape != (cv.draw_count,):
        raise ValueError(f"f_values must have shape ({cv.draw_count},), got {f.shape}")
    if fit.coefficients.shape != (cv.column_count,):
        raise ValueError("fit and control variate matrix disagree on column count")
    return f + cv.values @ fit.coefficients


@dataclass(frozen=True)
class ZvResult:
    """Zero-variance estimate with the evidence used to produce it."""

    estimate: float
    fit: ZVFit
    ftilde: np.ndarray
    basis: MonomialBasis
    protocol: str  # "two-chain" or "single-chain"


def _resolve_f(f, draws):
    if callable(f):
        vals = np.asarray(f(draws), dtype=float)
        if vals.shape != (draws.shape[0],):
            raise ValueError("f must map (N, d) draws to (N,) values")
        return vals
    j = int(f)
    if not 0 <= j < draws.shape[1]:
        raise ValueError(f"coordinate index {j} out of range for dimension {draws.shape[1]}")
    return draws[:, j].astype(float)


def zv_estimate(
    model,
    f,
    fit_chain: ChainOutput,
    eval_chain: ChainOutput | None = None,
    degree: int = 1,
    exclusions=None,
    standardize: bool = True,
) -> ZvResult:
    """Fit coefficients on one chain, average the renormalized f on another.

    f is a coordinate index or a callable on the draws.  eval_chain = None
    selects the single-chain protocol (fit and evaluate on fit_chain), which
    introduces a small adaptation bias and is off by default in the CLI.
    standardize builds the monomials in fit-chain-standardized coordinates;
    turn it off to work with the raw monomial coefficients directly.
    """
    if exclusions is None:
        exclusions = default_exclusions(model)
    basis = monomial_basis(model.dimension, degree, exclusions)
    center, scale = standardization_from_chain(fit_chain) if standardize else (None, None)
    cv_fit = eval_control_variates(fit_chain, basis, center=center, scale=scale)
    fit = fit_coefficients(cv_fit, _resolve_f(f, fit_chain.draws))
    if eval_chain is None or eval_chain is fit_chain:
        protocol = "single-chain"
        cv_eval = cv_fit
        f_eval = _resolve_f(f, fit_chain.draws)
    else:
        protocol = "two-chain"
        cv_eval = eval_control_variates(eval_chain, basis, center=center, scale=scale)
        f_eval = _resolve_f(f, eval_chain.draws)
    ftilde = renormalize(f_eval, cv_eval, fit)
    return ZvResult(
        estimate=float(ftilde.mean()),
        fit=fit,
        ftilde=ftilde,
        basis=basis,
        protocol=protocol,
    )
