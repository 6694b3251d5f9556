import numpy as np
import pytest
from helpers import ar1_series
from hypothesis import given, settings
from hypothesis import strategies as st

from zvmcmc import (
    GammaTarget,
    GaussianTarget,
    ProbitTarget,
    RatioReport,
    ReplicationStudy,
    SamplerConfig,
    batch_means_asvar,
    cv_zero_mean_test,
    eval_control_variates,
    linnik_estimate,
    long_chain_reference,
    moment_diagnostic,
    monomial_basis,
    rw_metropolis,
    sample_chain,
    synthetic_banknote,
    variance_ratio,
)
from test_zv import make_chain

# ---------------------------------------------------------------------------
# batch means


def test_batch_means_asvar_iid_matches_variance():
    rng = np.random.default_rng(31)
    x = rng.normal(0.0, 1.7, size=40000)
    assert batch_means_asvar(x, 200) == pytest.approx(1.7**2, rel=0.25)


def test_batch_means_asvar_ar1_oracle():
    # asymptotic variance of an AR(1) mean is sigma^2 (1+rho)/(1-rho)
    rho, sigma = 0.6, 1.3
    x = ar1_series(rho, sigma, 60000, seed=32)
    expected = sigma**2 * (1 + rho) / (1 - rho)
    assert batch_means_asvar(x, 150) == pytest.approx(expected, rel=0.25)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), shift=st.floats(-100, 100), scale=st.floats(0.01, 50))
def test_batch_means_asvar_affine_behavior(seed, shift, scale):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=500)
    base = batch_means_asvar(x, 10)
    assert batch_means_asvar(x + shift, 10) == pytest.approx(base, rel=1e-7, abs=1e-12)
    assert batch_means_asvar(scale * x, 10) == pytest.approx(scale**2 * base, rel=1e-9)


def test_batch_means_asvar_validation():
    with pytest.raises(ValueError):
        batch_means_asvar(np.ones((4, 4)), 10)
    with pytest.raises(ValueError):
        batch_means_asvar(np.array([1.0, np.nan] * 50), 10)
    with pytest.raises(ValueError):
        batch_means_asvar(np.ones(100), 5)
    with pytest.raises(ValueError):
        batch_means_asvar(np.ones(15), 10)


# ---------------------------------------------------------------------------
# variance ratios


def toy_study(rng, R=40, zv_noise=0.1):
    ordinary = rng.normal(size=(R, 2))
    zv = {1: zv_noise * rng.normal(size=(R, 2))}
    return ReplicationStudy(
        ordinary_estimates=ordinary,
        zv_estimates=zv,
        seeds=np.arange(R),
        parameter_names=("a", "b"),
    )


def test_variance_ratio_identical_arms_is_one():
    rng = np.random.default_rng(33)
    ordinary = rng.normal(size=(30, 1))
    study = ReplicationStudy(
        ordinary_estimates=ordinary,
        zv_estimates={1: ordinary.copy()},
        seeds=np.arange(30),
        parameter_names=("a",),
    )
    rep = variance_ratio(study, 0, 1)
    assert rep.point == 1.0
    assert rep.lower <= 1.0 <= rep.upper


def test_variance_ratio_interval_contains_point():
    rng = np.random.default_rng(34)
    study = toy_study(rng)
    rep = variance_ratio(study, 0, 1, resamples=500, seed=7)
    assert isinstance(rep, RatioReport)
    assert rep.method == "paired-percentile-bootstrap"
    assert 0 < rep.lower <= rep.point <= rep.upper
    assert not rep.infinite
    # same seed, same interval
    rep2 = variance_ratio(study, 0, 1, resamples=500, seed=7)
    assert (rep.lower, rep.point, rep.upper) == (rep2.lower, rep2.point, rep2.upper)


def test_variance_ratio_small_study_is_point_only():
    rng = np.random.default_rng(35)
    study = toy_study(rng, R=10)
    rep = variance_ratio(study, 1, 1)
    assert rep.method == "point-only"
    assert np.isnan(rep.lower) and np.isnan(rep.upper)
    assert rep.resamples == 0


def test_variance_ratio_exact_cv_reports_infinite():
    rng = np.random.default_rng(36)
    R = 25
    study = ReplicationStudy(
        ordinary_estimates=rng.normal(size=(R, 1)),
        zv_estimates={2: np.full((R, 1), 3.14)},
        seeds=np.arange(R),
        parameter_names=("a",),
    )
    rep = variance_ratio(study, 0, 2)
    assert rep.infinite
    assert np.isinf(rep.point)
    assert np.isinf(rep.upper)


def test_variance_ratio_errors():
    rng = np.random.default_rng(37)
    study = toy_study(rng)
    with pytest.raises(KeyError):
        variance_ratio(study, 0, 3)
    tiny = toy_study(rng, R=1)
    with pytest.raises(ValueError):
        variance_ratio(tiny, 0, 1)


# ---------------------------------------------------------------------------
# zero-mean checks


def test_zero_mean_passes_with_correct_gradients():
    model = GaussianTarget(mu=1.0, sigma2=2.0)
    chain = rw_metropolis(model, SamplerConfig(length=6000, burn_in=500, seed=38))
    cv = eval_control_variates(chain, monomial_basis(1, 2))
    rep = cv_zero_mean_test(cv)
    assert rep.z_scores.shape == (2,)
    assert np.all(np.abs(rep.z_scores) < 4.0)
    assert not rep.degenerate.any()


def test_zero_mean_flags_wrong_gradients():
    # score a unit-variance gaussian chain with the gradient of a variance-4
    # gaussian; the quadratic control variate x^2/4 - 1 then has mean -3/4
    model = GaussianTarget(mu=0.0, sigma2=1.0)
    chain = rw_metropolis(model, SamplerConfig(length=6000, burn_in=500, seed=39))
    wrong = make_chain(chain.draws, -chain.draws / 4.0, tag="gaussian")
    cv = eval_control_variates(wrong, monomial_basis(1, 2))
    rep = cv_zero_mean_test(cv)
    assert abs(rep.z_scores[1]) > 10.0


def test_zero_mean_degenerate_column_gets_nan():
    rng = np.random.default_rng(40)
    draws = rng.normal(size=(2000, 2))
    grads = np.column_stack([np.full(2000, 2.0), rng.normal(size=2000)])
    cv = eval_control_variates(make_chain(draws, grads), monomial_basis(2, 1))
    rep = cv_zero_mean_test(cv)
    assert rep.degenerate[0] and not rep.degenerate[1]
    assert np.isnan(rep.z_scores[0]) and np.isfinite(rep.z_scores[1])


def test_zero_mean_needs_enough_draws():
    rng = np.random.default_rng(41)
    cv = eval_control_variates(
        make_chain(rng.normal(size=(500, 1)), rng.normal(size=(500, 1))),
        monomial_basis(1, 1),
    )
    with pytest.raises(ValueError):
        cv_zero_mean_test(cv)


# ---------------------------------------------------------------------------
# tail diagnostics


def test_linnik_estimate_gaussian_value():
    model = GaussianTarget(mu=0.0, sigma2=2.0)
    chain = rw_metropolis(model, SamplerConfig(length=20000, burn_in=1000, seed=42))
    rep = linnik_estimate(chain)
    # E[(d log pi/dx)^2] = 1/sigma2
    assert rep.estimates[0] == pytest.approx(0.5, abs=0.08)
    assert not rep.divergent[0]
    assert rep.trace.shape[0] == rep.trace_indices.shape[0]
    assert np.all(np.diff(rep.trace_indices) > 0)
    assert rep.trace[-1, 0] == rep.estimates[0]


def test_linnik_gamma3_stable_for_fixed_seed():
    model = GammaTarget(shape=3.0, scale=1.0)
    chain = rw_metropolis(model, SamplerConfig(length=20000, burn_in=1000, seed=43))
    rep = linnik_estimate(chain)
    assert not rep.divergent[0]


def test_moment_diagnostic_stable_for_gaussian():
    model = GaussianTarget()
    chain = rw_metropolis(model, SamplerConfig(length=5000, burn_in=500, seed=44))
    cv = eval_control_variates(chain, monomial_basis(1, 2))
    rep = moment_diagnostic(cv, delta=0.5)
    assert rep.delta == 0.5
    assert rep.means.shape == (2,)
    assert np.all(rep.means > 0)
    assert rep.stable.all()
    with pytest.raises(ValueError):
        moment_diagnostic(cv, delta=0.0)


# ---------------------------------------------------------------------------
# long reference chains


def test_long_chain_reference_brackets_truth():
    model = GaussianTarget(mu=3.0, sigma2=1.5)
    rep = long_chain_reference(model, 40000, seed=45)
    assert rep.length == 40000
    assert rep.lower[0] < 3.0 < rep.upper[0]
    assert rep.upper[0] - rep.point[0] == pytest.approx(rep.point[0] - rep.lower[0])
    assert rep.asvar[0] > 0


def test_long_chain_reference_accepts_existing_chain():
    model = GaussianTarget()
    chain = rw_metropolis(
        model, SamplerConfig(length=5000, burn_in=200, seed=46, compute_gradients=False)
    )
    rep = long_chain_reference(model, 5000, seed=46, chain=chain)
    assert rep.point[0] == pytest.approx(chain.draws[:, 0].mean())


def test_long_chain_reference_gibbs_method():
    model = ProbitTarget(synthetic_banknote(seed=101, n=80))
    rep = long_chain_reference(model, 2000, seed=47, method="gibbs", burn_in=200)
    assert rep.point.shape == (4,)
    assert np.all(rep.upper > rep.lower)
