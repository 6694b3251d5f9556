"""Data loading, chain and study serialization, synthetic datasets.

Real datasets are not redistributed; the synthetic generators produce
seeded stand-ins with the same shape and rough statistical texture, and
every loader accepts a user-supplied file instead.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .models import BinaryRegressionData, ReturnsSeries
from .samplers import ChainOutput

__all__ = [
    "DataLoadError",
    "PriceSeries",
    "load_design_matrix",
    "load_price_series",
    "prices_to_returns",
    "export_chain",
    "import_chain",
    "export_study",
    "synthetic_banknote",
    "synthetic_demgbp_returns",
]


class DataLoadError(ValueError):
    """A data file failed validation; the message carries file and line."""


@dataclass(frozen=True)
class PriceSeries:
    """Price level series with string date labels."""

    dates: tuple[str, ...]
    prices: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.prices, dtype=float)
        if p.ndim != 1 or p.size < 3:
            raise ValueError("prices must be a 1-d array with at least 3 entries")
        if not np.all(np.isfinite(p) & (p > 0.0)):
            raise ValueError("prices must be finite and > 0")
        if len(self.dates) != p.size:
            raise ValueError("dates and prices must have the same length")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "prices", p)
        object.__setattr__(self, "dates", tuple(self.dates))


def _parse_float(text, path, line_no, col_name):
    try:
        return float(text)
    except ValueError:
        raise DataLoadError(
            f"{path}:{line_no}: could not parse {col_name}={text!r} as a number"
        ) from None


def load_design_matrix(path, add_intercept: bool = False) -> BinaryRegressionData:
    """Read a CSV with a 0/1 column named y, all other columns regressors.

    Regressors keep file order; add_intercept prepends a column of ones.
    Validation failures name the file and line.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataLoadError(f"{path}:1: file is empty") from None
        header = [h.strip() for h in header]
        if "y" not in header:
            raise DataLoadError(f"{path}:1: header must contain a response column named 'y'")
        y_col = header.index("y")
        x_cols = [i for i in range(len(header)) if i != y_col]
        if not x_cols:
            raise DataLoadError(f"{path}:1: no regressor columns besides 'y'")
        rows = []
        ys = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataLoadError(
                    f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}"
                )
            y_val = _parse_float(row[y_col], path, line_no, "y")
            if y_val not in (0.0, 1.0):
                raise DataLoadError(f"{path}:{line_no}: response must be 0 or 1, got {row[y_col]!r}")
            ys.append(y_val)
            rows.append([_parse_float(row[i], path, line_no, header[i]) for i in x_cols])
    if not rows:
        raise DataLoadError(f"{path}:2: no data rows")
    X = np.asarray(rows, dtype=float)
    if add_intercept:
        X = np.hstack([np.ones((X.shape[0], 1)), X])
    zero_rows = np.flatnonzero(~np.any(X != 0.0, axis=1))
    if zero_rows.size:
        raise DataLoadError(f"{path}:{int(zero_rows[0]) + 2}: design row is all zeros")
    try:
        return BinaryRegressionData(design=X, response=np.asarray(ys, dtype=float))
    except ValueError as exc:
        raise DataLoadError(f"{path}: {exc}") from None


def load_price_series(path) -> PriceSeries:
    """CSV with columns date,price in that order (header required)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataLoadError(f"{path}:1: file is empty") from None
        if len(header) < 2 or header[0] != "date" or header[1] != "price":
            raise DataLoadError(f"{path}:1: expected header date,price, got {header}")
        dates = []
        prices = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            dates.append(row[0].strip())
            prices.append(_parse_float(row[1], path, line_no, "price"))
    try:
        return PriceSeries(dates=tuple(dates), prices=np.asarray(prices, dtype=float))
    except ValueError as exc:
        raise DataLoadError(f"{path}: {exc}") from None


def prices_to_returns(series: PriceSeries) -> ReturnsSeries:
    """Simple returns r_t = (p_t - p_{t-1}) / p_{t-1}, h0 = sample variance.

    h0 uses ddof=1; a constant price series has zero variance and is rejected
    because the GARCH recursion cannot be seeded from it.
    """
    p = series.prices
    returns = np.diff(p) / p[:-1]
    h0 = float(np.var(returns, ddof=1))
    if h0 <= 0.0:
        raise DataLoadError("returns have zero sample variance, cannot seed h0")
    return ReturnsSeries(returns=returns, h0=h0)


# ---------------------------------------------------------------------------
# chain CSV round trip


def export_chain(chain: ChainOutput, path) -> None:
    """Write iter,beta_1..beta_d,grad_1..grad_d with round-trippable floats."""
    d = chain.dimension
    header = ["iter"] + [f"beta_{j + 1}" for j in range(d)] + [f"grad_{j + 1}" for j in range(d)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(chain.length):
            row = [str(i)]
            row += [f"{v:.17g}" for v in chain.draws[i]]
            row += [f"{v:.17g}" for v in chain.gradients[i]]
            writer.writerow(row)


def import_chain(path) -> ChainOutput:
    """Read a chain written by export_chain; sampler metadata is not stored."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataLoadError(f"{path}:1: file is empty") from None
        if not header or header[0] != "iter" or (len(header) - 1) % 2 != 0:
            raise DataLoadError(f"{path}:1: malformed chain header {header}")
        d = (len(header) - 1) // 2
        expected = ["iter"] + [f"beta_{j + 1}" for j in range(d)] + [f"grad_{j + 1}" for j in range(d)]
        if header != expected:
            raise DataLoadError(f"{path}:1: malformed chain header {header}")
        draws = []
        grads = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 1 + 2 * d:
                raise DataLoadError(f"{path}:{line_no}: expected {1 + 2 * d} fields, got {len(row)}")
            draws.append([_parse_float(v, path, line_no, "beta") for v in row[1 : 1 + d]])
            grads.append([_parse_float(v, path, line_no, "grad") for v in row[1 + d :]])
    if not draws:
        raise DataLoadError(f"{path}:2: no data rows")
    return ChainOutput(
        draws=np.asarray(draws, dtype=float),
        gradients=np.asarray(grads, dtype=float),
        accept_rate=float("nan"),
        seed_used=0,
        model_tag="imported",
        pilot_accept_rate=None,
    )


# ---------------------------------------------------------------------------
# study JSON


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if np.isnan(v):
            return None
        if v == np.inf:
            return "inf"
        if v == -np.inf:
            return "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def export_study(report: dict, path) -> None:
    """Serialize a study report to JSON.

    Infinite ratios become the string "inf" (the report carries an explicit
    *_infinite flag next to them); NaN becomes null.  Everything else is
    plain JSON so a rerun with the same config and seed is byte-identical
    outside the timing block.
    """
    with open(path, "w") as fh:
        json.dump(_jsonable(report), fh, indent=2, allow_nan=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# synthetic datasets


# Measurement-style class templates for the synthetic banknote generator:
# per-class means and standard deviations of the four regressors (first three
# recorded as deviations from a nominal size, the last a raw margin width),
# plus a shared within-class correlation.  The two classes overlap but are
# nearly separated along the margin coordinate, which is what produces the
# strongly skewed, soft-wall posterior this dataset is meant to exercise.
_BANKNOTE_MEAN_A = (0.0, -0.1, -0.3, 8.31)
_BANKNOTE_MEAN_B = (-0.225, 0.5, 0.45, 11.64)
_BANKNOTE_SD_A = (0.39, 0.36, 0.45, 0.64)
_BANKNOTE_SD_B = (0.35, 0.26, 0.31, 0.77)
_BANKNOTE_CORR = (
    (1.0, 0.3, 0.3, 0.1),
    (0.3, 1.0, 0.6, 0.2),
    (0.3, 0.6, 1.0, 0.2),
    (0.1, 0.2, 0.2, 1.0),
)


def synthetic_banknote(seed: int = 101, n: int = 200, dimension: int = 4) -> BinaryRegressionData:
    """Seeded stand-in for a two-class banknote measurement dataset.

    n rows split evenly between two classes of correlated Gaussian
    measurement vectors (response 1 for the second class), dimension <= 4
    columns taken from fixed per-class templates.  The classes are close to
    separated along the last kept column, giving a skewed posterior for the
    no-intercept binary regressions fitted to it.
    """
    if not 1 <= dimension <= 4:
        raise ValueError(f"dimension must be in [1, 4], got {dimension}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    cols = list(range(4 - dimension, 4))
    mu_a = np.array(_BANKNOTE_MEAN_A)[cols]
    mu_b = np.array(_BANKNOTE_MEAN_B)[cols]
    sd_a = np.array(_BANKNOTE_SD_A)[cols]
    sd_b = np.array(_BANKNOTE_SD_B)[cols]
    corr = np.array(_BANKNOTE_CORR)[np.ix_(cols, cols)]
    L = np.linalg.cholesky(corr)
    n_a = n // 2
    n_b = n - n_a
    X_a = mu_a + (rng.standard_normal((n_a, dimension)) @ L.T) * sd_a
    X_b = mu_b + (rng.standard_normal((n_b, dimension)) @ L.T) * sd_b
    X = np.vstack([X_a, X_b])
    y = np.concatenate([np.zeros(n_a), np.ones(n_b)])
    return BinaryRegressionData(design=X, response=y)


def synthetic_demgbp_returns(seed: int = 333, length: int = 1974) -> ReturnsSeries:
    """Seeded GARCH(1,1) simulation shaped like the DEM/GBP daily returns.

    omega = (0.01, 0.15, 0.80), a long warmup discarded, h0 set to the sample
    variance of the emitted returns to match the estimation convention.  The
    default length matches the widely circulated daily benchmark series for
    that currency pair.
    """
    rng = np.random.default_rng(seed)
    om1, om2, om3 = 0.01, 0.15, 0.80
    warmup = 200
    h = om1 / (1.0 - om2 - om3)
    r = 0.0
    out = np.empty(length)
    for t in range(-warmup, length):
        h = om1 + om3 * h + om2 * r * r
        r = np.sqrt(h) * rng.standard_normal()
        if t >= 0:
            out[t] = r
    return ReturnsSeries(returns=out, h0=float(np.var(out, ddof=1)))
