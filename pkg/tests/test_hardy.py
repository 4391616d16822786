import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dhs.hardy import (
    HardyFunction,
    diff_bounds,
    diff_experiment,
    differentiate,
    hardy_norm,
    hardy_truth,
)
from dhs.scales import vhs_norm
from dhs.spectral import SpectralDensity


def random_hardy(seed, K=40):
    rng = np.random.default_rng(seed)
    k = np.arange(1, K + 1)
    c = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) * 2.0**-k
    return HardyFunction(c)


# -- norms -------------------------------------------------------------------------------

def test_hardy_norm_examples():
    assert hardy_norm(HardyFunction([1.0]), 2.0) == pytest.approx(2.0)
    g = random_hardy(0)
    assert hardy_norm(g, 1.0) == pytest.approx(g.norm(), rel=1e-14)
    K = 30
    halves = HardyFunction(2.0 ** -np.arange(1, K + 1))
    assert hardy_norm(halves, 2.0) == pytest.approx(math.sqrt(K), rel=1e-14)


def test_hardy_norm_domain():
    with pytest.raises(ValueError):
        hardy_norm(HardyFunction([1.0]), 0.5)
    assert hardy_norm(HardyFunction([0.0, 0.0]), 3.0) == 0.0


def test_hardy_norm_overflow(caplog):
    g = HardyFunction(np.ones(2000))
    with caplog.at_level(logging.WARNING):
        assert hardy_norm(g, 10.0) == math.inf
    assert "overflow" in caplog.text


def test_coefficient_validation():
    with pytest.raises(ValueError):
        HardyFunction([])
    with pytest.raises(ValueError):
        HardyFunction([1.0, np.nan])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.floats(1.0, 4.0), st.floats(1.0, 4.0))
def test_hardy_norm_monotone_in_R(seed, r1, r2):
    g = random_hardy(seed)
    lo, hi = sorted((r1, r2))
    assert hardy_norm(g, lo) <= hardy_norm(g, hi) * (1 + 1e-14)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("R", [1.0, 1.5, 2.0])
def test_hardy_norm_agrees_with_vhs_norm(seed, R):
    g = random_hardy(seed)
    d = SpectralDensity(g.powers.astype(float), np.abs(g.coeffs) ** 2)
    assert vhs_norm(d, lambda lam: R ** (2 * lam)) == pytest.approx(hardy_norm(g, R), rel=1e-12)


# -- differentiation ---------------------------------------------------------------------------

def test_differentiate_examples():
    d = differentiate(HardyFunction([0.0, 1.0]))
    assert np.array_equal(d, [0.0, 2.0])          # z^2 -> 2z
    assert np.all(differentiate(HardyFunction(np.zeros(5))) == 0)


def test_derivative_norm():
    g = random_hardy(3)
    direct = math.sqrt(np.sum(g.powers**2 * np.abs(g.coeffs) ** 2))
    assert np.linalg.norm(differentiate(g)) == pytest.approx(direct, rel=1e-12)


# -- bounds --------------------------------------------------------------------------------

def test_diff_bounds_examples():
    b = diff_bounds(1.0, 1e-4, math.e)
    assert b["vhs"] == pytest.approx(2e-4 * math.log(1e4), rel=1e-12)
    assert b["vhs"] == pytest.approx(1.8421e-3, abs=1e-7)
    assert b["ohs"] == pytest.approx(0.02, rel=1e-12)
    assert b["vhs"] < b["ohs"]


@pytest.mark.parametrize("args", [(1.0, 1e-3, 1.0), (1.0, 1e-3, 0.5), (1.0, 2.0, 2.0),
                                  (0.0, 1e-3, 2.0), (1.0, 0.0, 2.0)])
def test_diff_bounds_domain(args):
    with pytest.raises(ValueError):
        diff_bounds(*args)


def test_vhs_eventually_beats_ohs():
    for R in (1.1, 2.0, 10.0):
        eps = 10.0 ** -np.arange(1, 40)
        vhs = [diff_bounds(1.0, e, R)["vhs"] for e in eps]
        ohs = [diff_bounds(1.0, e, R)["ohs"] for e in eps]
        assert vhs[-1] < ohs[-1]


# -- experiment --------------------------------------------------------------------------------

def test_truth_has_certified_constant():
    g = hardy_truth()
    assert hardy_norm(g, 2.0) <= 1.0
    assert hardy_norm(g, 2.0) == pytest.approx(math.sqrt(0.5), rel=1e-12)


def test_noiseless_experiment_is_exact():
    rep = diff_experiment(hardy_truth(), 2.0, 0.0, seed=0)
    assert rep.empirical_error <= 1e-10
    assert rep.vhs_bound is None


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("eps", [1e-2, 1e-3, 1e-4])
def test_error_below_vhs_bound(seed, eps):
    rep = diff_experiment(hardy_truth(seed=seed), 2.0, eps, seed)
    assert rep.k_star >= 2
    assert rep.empirical_error <= rep.vhs_bound


def test_relative_error_grows_logarithmically():
    g = hardy_truth()

    def mean_ratio(eps):
        return np.mean([diff_experiment(g, 2.0, eps, s).empirical_error / eps for s in range(10)])

    growth = mean_ratio(1e-4) / mean_ratio(1e-2)
    # |log eps| doubles over the sweep while eps^(-1/2) grows tenfold
    assert 1.0 < growth < 4.0


def test_experiment_deterministic_and_report_keys():
    a = diff_experiment(hardy_truth(), 2.0, 1e-3, 5).to_dict()
    b = diff_experiment(hardy_truth(), 2.0, 1e-3, 5).to_dict()
    assert a == b
    assert set(a) == {"epsilon", "K", "R", "C", "k_star", "empirical_error", "vhs_bound",
                      "ohs_bound"}


def test_experiment_validation():
    g = hardy_truth()
    with pytest.raises(ValueError):
        diff_experiment(g, 2.0, -1.0, 0)
    with pytest.raises(ValueError):
        diff_experiment(g, 2.0, 1e-3, 0, method="tikhonov")
    with pytest.raises(ValueError):
        diff_experiment(g, 1.0, 1e-3, 0)
