import json

import numpy as np
import pytest

from zvmcmc import (
    DataLoadError,
    GaussianTarget,
    PriceSeries,
    SamplerConfig,
    export_chain,
    export_study,
    import_chain,
    load_design_matrix,
    load_price_series,
    prices_to_returns,
    rw_metropolis,
    synthetic_banknote,
    synthetic_demgbp_returns,
)

# ---------------------------------------------------------------------------
# CSV loaders


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_design_matrix_roundtrip(tmp_path):
    p = write(tmp_path, "d.csv", "x1,y,x2\n1.5,0,2.0\n-0.5,1,0.25\n3.0,1,1.0\n0.0,0,4.0\n")
    data = load_design_matrix(p)
    assert data.n == 4 and data.dimension == 2
    # y column removed, regressor order preserved
    assert np.allclose(data.design[:, 0], [1.5, -0.5, 3.0, 0.0])
    assert np.allclose(data.design[:, 1], [2.0, 0.25, 1.0, 4.0])
    assert np.allclose(data.response, [0, 1, 1, 0])


def test_load_design_matrix_intercept(tmp_path):
    p = write(tmp_path, "d.csv", "x1,y\n1.0,0\n2.0,1\n-1.0,1\n")
    data = load_design_matrix(p, add_intercept=True)
    assert data.dimension == 2
    assert np.all(data.design[:, 0] == 1.0)


def test_load_design_matrix_errors(tmp_path):
    with pytest.raises(DataLoadError):
        load_design_matrix(write(tmp_path, "a.csv", ""))
    with pytest.raises(DataLoadError):
        load_design_matrix(write(tmp_path, "b.csv", "x1,x2\n1,2\n"))  # no y
    with pytest.raises(DataLoadError):
        load_design_matrix(write(tmp_path, "c.csv", "x1,y\n1,0\n2\n"))  # ragged
    with pytest.raises(DataLoadError):
        load_design_matrix(write(tmp_path, "d.csv", "x1,y\nfoo,0\n1,1\n"))
    with pytest.raises(DataLoadError):
        load_design_matrix(write(tmp_path, "e.csv", "x1,y\n1,2\n2,0\n"))  # y not 0/1


def test_load_price_series_and_returns(tmp_path):
    p = write(tmp_path, "p.csv", "date,price\n2001-01-01,100.0\n2001-01-02,101.0\n2001-01-03,99.99\n")
    series = load_price_series(p)
    assert series.dates == ("2001-01-01", "2001-01-02", "2001-01-03")
    returns = prices_to_returns(series)
    assert returns.length == 2
    assert returns.returns[0] == pytest.approx(0.01)
    assert returns.returns[1] == pytest.approx((99.99 - 101.0) / 101.0)
    assert returns.h0 == pytest.approx(np.var(returns.returns, ddof=1))


def test_load_price_series_errors(tmp_path):
    with pytest.raises(DataLoadError):
        load_price_series(write(tmp_path, "a.csv", "time,price\n1,2\n"))
    with pytest.raises(DataLoadError):
        load_price_series(write(tmp_path, "b.csv", "date,price\nd1,-3\nd2,2\nd3,2\n"))


def test_constant_prices_rejected():
    series = PriceSeries(dates=("a", "b", "c", "d"), prices=np.array([5.0, 5.0, 5.0, 5.0]))
    with pytest.raises(DataLoadError):
        prices_to_returns(series)


# ---------------------------------------------------------------------------
# chain round trip


def test_chain_roundtrip_is_exact(tmp_path):
    chain = rw_metropolis(GaussianTarget(), SamplerConfig(length=50, burn_in=10, seed=3))
    path = tmp_path / "chain.csv"
    export_chain(chain, path)
    back = import_chain(path)
    assert np.array_equal(back.draws, chain.draws)
    assert np.array_equal(back.gradients, chain.gradients)


def test_import_chain_rejects_malformed(tmp_path):
    p = write(tmp_path, "bad.csv", "iter,beta_1\n0,1.0\n")
    with pytest.raises(DataLoadError):
        import_chain(p)


# ---------------------------------------------------------------------------
# study export


def test_export_study_sanitizes_nonfinite(tmp_path):
    report = {
        "a": float("inf"),
        "b": float("nan"),
        "c": np.float64(2.5),
        "d": [np.int64(3), (1, 2)],
    }
    path = tmp_path / "r.json"
    export_study(report, path)
    loaded = json.loads(path.read_text())
    assert loaded == {"a": "inf", "b": None, "c": 2.5, "d": [3, [1, 2]]}


# ---------------------------------------------------------------------------
# synthetic datasets


def test_synthetic_banknote_shape_and_determinism():
    a = synthetic_banknote(seed=101)
    b = synthetic_banknote(seed=101)
    assert a.n == 200 and a.dimension == 4
    assert np.array_equal(a.design, b.design)
    assert np.array_equal(a.response, b.response)
    assert a.response.sum() == 100  # balanced classes
    c = synthetic_banknote(seed=102)
    assert not np.array_equal(a.design, c.design)


def test_synthetic_banknote_dimension_slices_last_columns():
    full = synthetic_banknote(seed=101, n=60, dimension=4)
    narrow = synthetic_banknote(seed=101, n=60, dimension=2)
    assert narrow.dimension == 2
    # the margin-like separating column is always retained as the last one
    assert abs(full.design[:, 3].mean() - narrow.design[:, 1].mean()) < 2.0
    with pytest.raises(ValueError):
        synthetic_banknote(dimension=5)


def test_synthetic_demgbp_returns_frozen():
    a = synthetic_demgbp_returns()
    assert a.length == 1974
    b = synthetic_demgbp_returns(seed=333, length=1974)
    assert np.array_equal(a.returns, b.returns)
    assert a.h0 == pytest.approx(np.var(a.returns, ddof=1))
    short = synthetic_demgbp_returns(seed=333, length=50)
    assert short.length == 50
