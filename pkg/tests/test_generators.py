import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import normal_quantile_mp
from scipy.special import ndtr

from cudmcmc.errors import DimensionMismatch, DomainError
from cudmcmc.generators import (LARGE, NEGATIVE, POSITIVE, ExtendedValueWarning,
                                bivariate_normal_rosenblatt, gamma_quantile, inverse_rosenblatt,
                                normal_quantile, RosenblattSpec, truncated_normal_inverse)
from cudmcmc.streams import CUD_LCG, StreamSpec, make_stream

open_unit = st.floats(1e-8, 1 - 1e-8)


def test_normal_quantile_examples():
    assert normal_quantile(0.5) == 0.0
    assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-5)
    for u in (0.1, 0.3):
        assert normal_quantile(u) == pytest.approx(-normal_quantile(1 - u), abs=1e-15)


@pytest.mark.parametrize("u", [1e-10, 1e-5, 0.01, 0.2, 0.5, 0.77, 0.975, 1 - 1e-6])
def test_normal_quantile_against_bisection_oracle(u):
    assert normal_quantile(u) == pytest.approx(normal_quantile_mp(u), rel=1e-12, abs=1e-13)


@given(open_unit)
def test_normal_round_trip(u):
    assert abs(ndtr(normal_quantile(u)) - u) < 1e-12


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5, np.nan])
def test_normal_quantile_domain(bad):
    with pytest.raises(DomainError):
        normal_quantile(bad)


def test_extended_endpoints_clamp_with_warning():
    with pytest.warns(ExtendedValueWarning):
        assert normal_quantile(0.0, extended=True) == -LARGE
    with pytest.warns(ExtendedValueWarning):
        assert normal_quantile(1.0, extended=True) == LARGE
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert normal_quantile(0.5, extended=True) == 0.0


def test_gamma_quantile():
    from scipy.stats import gamma
    for shape, rate, u in [(1.0, 2.0, 0.3), (6.802, 95.3, 0.9), (0.5, 1.0, 1e-6)]:
        assert gamma_quantile(shape, rate, u) == pytest.approx(
            gamma.ppf(u, shape, scale=1 / rate), rel=1e-10)
    with pytest.raises(DomainError):
        gamma_quantile(1.0, 1.0, 0.0)


def test_inverse_rosenblatt_examples():
    assert np.array_equal(inverse_rosenblatt(bivariate_normal_rosenblatt(0.0), [0.5, 0.5]),
                          [0.0, 0.0])
    x = inverse_rosenblatt(bivariate_normal_rosenblatt(0.5), [0.975, 0.5])
    assert x == pytest.approx([1.95996, 0.97998], abs=1e-4)
    one = RosenblattSpec([lambda u, prev: normal_quantile(u)])
    assert inverse_rosenblatt(one, [0.975])[0] == normal_quantile(0.975)
    with pytest.raises(DimensionMismatch):
        inverse_rosenblatt(one, [0.1, 0.2])
    with pytest.raises(DomainError):
        inverse_rosenblatt(one, [1.0])


def test_rosenblatt_pushforward_moments():
    u = make_stream(StreamSpec(kind=CUD_LCG, period_target=2 ** 16, tuple_dim=2)).blocks(2 ** 16, 2)
    x = inverse_rosenblatt(bivariate_normal_rosenblatt(0.5), u)
    cov = np.cov(x.T)
    assert np.all(np.abs(x.mean(axis=0)) < 0.02)
    assert np.all(np.abs(cov - [[1, 0.5], [0.5, 1]]) < 0.02)


def test_truncated_examples():
    q = normal_quantile_mp(0.75)
    assert truncated_normal_inverse(0.0, POSITIVE, 0.5) == pytest.approx(q, abs=1e-12)
    assert truncated_normal_inverse(0.0, NEGATIVE, 0.5) == pytest.approx(-q, abs=1e-12)
    with pytest.raises(ValueError):
        truncated_normal_inverse(0.0, "sideways", 0.5)


def test_truncated_matches_textbook_formula_in_safe_range():
    rng = np.random.default_rng(0)
    mean = rng.uniform(-3, 3, 1000)
    u = rng.uniform(0.01, 0.99, 1000)
    pos = mean + normal_quantile(ndtr(-mean) + u * ndtr(mean))
    neg = mean + normal_quantile(u * ndtr(-mean))
    assert np.allclose(truncated_normal_inverse(mean, POSITIVE, u), pos, atol=1e-9)
    assert np.allclose(truncated_normal_inverse(mean, NEGATIVE, u), neg, atol=1e-9)


def test_truncated_sign_constraint():
    rng = np.random.default_rng(1)
    mean = rng.uniform(-40, 40, 10 ** 4)
    u = rng.random(10 ** 4)
    assert np.all(truncated_normal_inverse(mean, POSITIVE, u) > 0)
    assert np.all(truncated_normal_inverse(mean, NEGATIVE, u) <= 0)


@pytest.mark.parametrize("mean", [-8.0, -1.0, 0.0, 2.5, 8.0])
@pytest.mark.parametrize("side", [POSITIVE, NEGATIVE])
def test_truncated_strictly_increasing(mean, side):
    u = np.linspace(0.001, 0.999, 999)
    z = truncated_normal_inverse(mean, side, u)
    assert np.all(np.diff(z) > 0)


def test_truncated_endpoint_warning():
    with pytest.warns(ExtendedValueWarning):
        truncated_normal_inverse(0.0, POSITIVE, 1e-16)
