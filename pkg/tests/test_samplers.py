import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from zvmcmc import (
    ExponentialTarget,
    GaussianTarget,
    ProbitTarget,
    SamplerConfig,
    batch_means_asvar,
    gibbs_probit,
    rw_metropolis,
    sample_chain,
    synthetic_banknote,
    truncated_normal_draw,
)

# ---------------------------------------------------------------------------
# truncated normal


@pytest.mark.parametrize(
    "mean,sd,lower,upper",
    [
        (0.3, 1.2, -0.5, 1.5),
        (0.0, 1.0, 1.0, np.inf),
        (2.0, 0.5, -np.inf, 1.8),
        (0.0, 1.0, 8.0, np.inf),  # deep tail, rejection sampling would stall
    ],
)
def test_truncated_normal_distribution(mean, sd, lower, upper):
    rng = np.random.default_rng(42)
    draws = np.array([truncated_normal_draw(mean, sd, lower, upper, rng) for _ in range(4000)])
    assert np.all(draws > lower) and np.all(draws < upper)
    a, b = (lower - mean) / sd, (upper - mean) / sd
    ks = stats.kstest(draws, stats.truncnorm(a, b, loc=mean, scale=sd).cdf)
    assert ks.pvalue > 1e-3


def test_truncated_normal_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        truncated_normal_draw(0.0, -1.0, 0.0, 1.0, rng)
    with pytest.raises(ValueError):
        truncated_normal_draw(0.0, 1.0, 2.0, 2.0, rng)


def test_truncated_normal_deterministic_under_seeded_rng():
    a = truncated_normal_draw(0.0, 1.0, 0.5, 2.0, np.random.default_rng(7))
    b = truncated_normal_draw(0.0, 1.0, 0.5, 2.0, np.random.default_rng(7))
    assert a == b


# ---------------------------------------------------------------------------
# random walk Metropolis


def test_rw_metropolis_gaussian_moments():
    model = GaussianTarget(mu=2.0, sigma2=3.0)
    out = rw_metropolis(model, SamplerConfig(length=20000, burn_in=500, seed=11))
    x = out.draws[:, 0]
    se = np.sqrt(batch_means_asvar(x, 100) / x.size)
    assert abs(x.mean() - 2.0) < 5 * se
    assert x.var(ddof=1) == pytest.approx(3.0, rel=0.15)
    assert 0.1 < out.accept_rate < 0.9
    assert out.pilot_accept_rate is not None
    assert out.seed_used == 11
    assert out.model_tag == "gaussian"


def test_rw_metropolis_gradients_align_with_model():
    model = GaussianTarget(mu=-1.0, sigma2=0.5)
    out = rw_metropolis(model, SamplerConfig(length=50, burn_in=10, seed=3))
    assert out.has_gradients
    for i in (0, 17, 49):
        assert np.allclose(out.gradients[i], model.grad_log_density(out.draws[i]))


def test_rw_metropolis_deterministic_and_seed_sensitive():
    model = GaussianTarget()
    cfg = SamplerConfig(length=200, burn_in=50, seed=9)
    a = rw_metropolis(model, cfg)
    b = rw_metropolis(model, SamplerConfig(length=200, burn_in=50, seed=9))
    assert np.array_equal(a.draws, b.draws)
    assert np.array_equal(a.gradients, b.gradients)
    c = rw_metropolis(model, SamplerConfig(length=200, burn_in=50, seed=10))
    assert not np.array_equal(a.draws, c.draws)


def test_thinning_subsamples_the_same_trajectory():
    model = GaussianTarget()
    full = rw_metropolis(model, SamplerConfig(length=400, burn_in=30, seed=5))
    thinned = rw_metropolis(model, SamplerConfig(length=200, burn_in=30, seed=5, thin=2))
    sub_even = full.draws[::2]
    sub_odd = full.draws[1::2]
    assert np.array_equal(thinned.draws, sub_even) or np.array_equal(thinned.draws, sub_odd)


def test_compute_gradients_false_skips_gradients():
    model = GaussianTarget()
    out = rw_metropolis(model, SamplerConfig(length=100, seed=1, compute_gradients=False))
    assert not out.has_gradients
    assert out.gradients.shape == (0, 1)


def test_tiny_proposal_stays_near_init():
    model = GaussianTarget()
    out = rw_metropolis(
        model,
        SamplerConfig(length=50, burn_in=0, seed=2, init=np.array([5.0]), proposal_sd=1e-10),
    )
    assert np.all(np.abs(out.draws - 5.0) < 1e-6)


def test_chain_respects_support():
    model = ExponentialTarget(lam=1.0)
    out = rw_metropolis(
        model,
        SamplerConfig(length=2000, burn_in=0, seed=8, init=np.array([0.01]), proposal_sd=1.0),
    )
    assert np.all(out.draws > 0.0)


def test_chain_output_immutable():
    out = rw_metropolis(GaussianTarget(), SamplerConfig(length=20, seed=0))
    with pytest.raises(ValueError):
        out.draws[0, 0] = 99.0


# ---------------------------------------------------------------------------
# probit Gibbs


def test_gibbs_probit_agrees_with_random_walk():
    data = synthetic_banknote(seed=101, n=120)
    model = ProbitTarget(data)
    gi = gibbs_probit(data, SamplerConfig(length=4000, burn_in=500, seed=21))
    rw = rw_metropolis(model, SamplerConfig(length=20000, burn_in=2000, seed=22, thin=1))
    assert gi.accept_rate == 1.0
    for j in range(model.dimension):
        mg = gi.draws[:, j].mean()
        mr = rw.draws[:, j].mean()
        se = np.sqrt(
            batch_means_asvar(gi.draws[:, j], 60) / gi.length
            + batch_means_asvar(rw.draws[:, j], 100) / rw.length
        )
        assert abs(mg - mr) < 6 * se


def test_gibbs_gradients_match_model():
    data = synthetic_banknote(seed=101, n=80)
    model = ProbitTarget(data)
    out = gibbs_probit(data, SamplerConfig(length=30, burn_in=20, seed=4))
    for i in (0, 29):
        assert np.allclose(out.gradients[i], model.grad_log_density(out.draws[i]))


def test_sample_chain_dispatch():
    data = synthetic_banknote(seed=101, n=80)
    out = sample_chain(ProbitTarget(data), SamplerConfig(length=10, seed=0), method="gibbs")
    assert out.model_tag == "probit"
    with pytest.raises(ValueError):
        sample_chain(GaussianTarget(), SamplerConfig(length=10, seed=0), method="gibbs")
    with pytest.raises(ValueError):
        sample_chain(GaussianTarget(), SamplerConfig(length=10, seed=0), method="slice")


# ---------------------------------------------------------------------------
# config validation


@settings(max_examples=30, deadline=None)
@given(
    length=st.integers(-3, 3),
    burn=st.integers(-2, 2),
    thin=st.integers(-1, 2),
)
def test_sampler_config_bounds(length, burn, thin):
    valid = length >= 1 and burn >= 0 and thin >= 1
    if valid:
        SamplerConfig(length=length, burn_in=burn, thin=thin)
    else:
        with pytest.raises(ValueError):
            SamplerConfig(length=length, burn_in=burn, thin=thin)


def test_sampler_config_rejects_bad_seed():
    with pytest.raises(ValueError):
        SamplerConfig(length=10, seed=-1)
    with pytest.raises(ValueError):
        SamplerConfig(length=10, seed=2**64)
