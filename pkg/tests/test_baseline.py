import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epgif import box_mean
from epgif.baseline import (
    BaselineParams,
    ggif_chi,
    ggif_filter,
    ggif_gamma,
    ggif_weighting,
    gif_coeffs,
    gif_filter,
    wgif_filter,
    wgif_weighting,
)
from epgif.edge_perceptual import EpgifParams
from epgif.errors import ParameterError, ShapeError
from epgif.oracle import naive_window_oracle

from conftest import naive_window_var

FILTERS = {"GIF": gif_filter, "WGIF": wgif_filter, "GGIF": ggif_filter}


def _step(n=8):
    g = np.zeros((n, n))
    g[:, n // 2:] = 1.0
    return g


def _direct_weighting(field, eps):
    flat = field.ravel()
    return np.array([sum((v + eps) / (u + eps) for u in flat) / flat.size for v in flat]).reshape(field.shape)


@pytest.mark.parametrize("name", FILTERS)
def test_constant_input_is_fixed_point(name):
    plane = np.full((10, 10), 0.42)
    out = FILTERS[name](plane, plane, BaselineParams(radius=2, lam=0.01))
    np.testing.assert_allclose(out, 0.42, rtol=0, atol=1e-14)


def test_gif_large_lambda_is_double_box_mean(rng):
    X = rng.random((12, 12))
    out = gif_filter(X, X, BaselineParams(radius=2, lam=1e9))
    expected = box_mean(box_mean(X, 2), 2)
    np.testing.assert_allclose(out, expected, rtol=0, atol=1e-8)


def test_gif_small_lambda_reproduces_input(rng):
    X = rng.random((12, 12))
    out = gif_filter(X, X, BaselineParams(radius=2, lam=1e-12))
    np.testing.assert_allclose(out, X, rtol=0, atol=1e-6)


@pytest.mark.parametrize("name,lam", [("GIF", 0.01), ("WGIF", 0.01), ("GGIF", 0.04)])
def test_self_guided_matches_oracle(rng, name, lam):
    X = rng.random((12, 12))
    p = BaselineParams(radius=2, lam=lam)
    np.testing.assert_allclose(FILTERS[name](X, X, p), naive_window_oracle(X, X, p, name), rtol=0, atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("name", FILTERS)
def test_fast_path_equals_oracle_16x16(name, seed):
    r = np.random.default_rng(seed)
    X, G = r.random((16, 16)), r.random((16, 16))
    p = BaselineParams(radius=3, lam=0.02)
    np.testing.assert_allclose(FILTERS[name](X, G, p), naive_window_oracle(X, G, p, name), rtol=0, atol=1e-10)


def test_wgif_weighting_constant_is_one():
    np.testing.assert_allclose(wgif_weighting(np.full((6, 6), 0.3), 1e-6), 1.0, rtol=0, atol=1e-14)


def test_wgif_weighting_ratio_identity(rng):
    G, eps = rng.random((9, 9)), 1e-6
    phi = wgif_weighting(G, eps)
    v = naive_window_var(G, 1)
    np.testing.assert_allclose(phi / phi[0, 0], (v + eps) / (v[0, 0] + eps), rtol=1e-12)


def test_wgif_weighting_step_direct_sum():
    G, eps = _step(), 1e-6
    expected = _direct_weighting(naive_window_var(G, 1), eps)
    np.testing.assert_allclose(wgif_weighting(G, eps), expected, rtol=1e-12, atol=0)


def test_wgif_slope_exceeds_gif_where_weighting_peaks(rng):
    X = rng.random((12, 12))
    X[:, 6:] += 1.0
    p = BaselineParams(radius=2, lam=0.01)
    phi = wgif_weighting(X, p.eps)
    y, x = np.unravel_index(np.argmax(phi), phi.shape)
    assert phi[y, x] > 1
    from epgif.stats import window_stats

    st_ = window_stats(X, X, 2)
    a_w = st_.cov_gx[y, x] / (st_.var_g[y, x] + p.lam / phi[y, x])
    a_g = gif_coeffs(X, X, p)[0][y, x]
    assert a_w >= a_g


def test_ggif_weighting_constant_is_one():
    np.testing.assert_allclose(ggif_weighting(np.full((6, 6), 0.3), 2, 1e-6), 1.0, rtol=0, atol=1e-14)


def test_ggif_weighting_step_direct_sum():
    G, eps = _step(), 1e-6
    chi = np.sqrt(naive_window_var(G, 1)) * np.sqrt(naive_window_var(G, 2))
    np.testing.assert_allclose(ggif_weighting(G, 2, eps), _direct_weighting(chi, eps), rtol=1e-12, atol=0)


def test_ggif_weighting_ratio_identity_under_scaling(rng):
    G, eps, s = rng.random((9, 9)), 1e-6, 3.0
    for plane in (G, s * G):
        chi = ggif_chi(plane, 2)
        w = ggif_weighting(plane, 2, eps)
        np.testing.assert_allclose(w / w[4, 4], (chi + eps) / (chi[4, 4] + eps), rtol=1e-12)
        assert np.all(w > 0)
    np.testing.assert_allclose(ggif_chi(s * G, 2), s * s * ggif_chi(G, 2), rtol=1e-12)


def test_gamma_anchor_at_mean():
    chi = np.array([0.0, 1.0, 2.0])  # mean 1
    assert ggif_gamma(chi)[1] == 0.5


def test_gamma_anchor_at_min():
    chi = np.array([0.0, 1.0, 2.0])
    # 1 - 1/(1 + e^-4)
    assert ggif_gamma(chi)[0] == pytest.approx(0.0180, abs=1e-3)
    assert ggif_gamma(chi)[0] == pytest.approx(math.exp(-4) / (1 + math.exp(-4)), rel=1e-14)


def test_gamma_saturates():
    chi = np.append(np.linspace(0.0, 1.0, 1000), [20.0, 50.0])
    gamma = ggif_gamma(chi)
    assert gamma[-2] <= gamma[-1]
    assert gamma[-1] == pytest.approx(1.0, abs=1e-12)


def test_gamma_constant_fallback():
    assert np.all(ggif_gamma(np.full(5, 0.3)) == 0.5)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=3, max_size=30, unique=True))
def test_gamma_monotone_and_bounded(values):
    chi = np.sort(np.array(values))
    gamma = ggif_gamma(chi)
    assert np.all(gamma >= 0) and np.all(gamma <= 1)
    assert np.all(np.diff(gamma) >= 0)


def test_gamma_strictly_increasing_moderate_range():
    chi = np.linspace(0, 1, 50)
    gamma = ggif_gamma(chi)
    assert np.all(np.diff(gamma) > 0)
    assert np.all((gamma > 0) & (gamma < 1))


def test_ggif_large_lambda_gamma_one_region():
    # where gamma ~ 1 and lambda dominates, the slope tends to 1
    G = np.zeros((16, 16))
    G[:, 8:] = 1.0
    X = G.copy()
    out_small = ggif_filter(X, G, BaselineParams(radius=2, lam=1e6))
    from epgif.stats import window_stats

    chi = ggif_chi(G, 2)
    gamma = ggif_gamma(chi)
    st_ = window_stats(X, G, 2)
    lam_eff = 1e6 / ggif_weighting(G, 2, 1e-6)
    a = (st_.cov_gx + lam_eff * gamma) / (st_.var_g + lam_eff)
    mask = gamma > 1 - 1e-9
    assert mask.any()
    np.testing.assert_allclose(a[mask], 1.0, atol=1e-6)
    assert np.isfinite(out_small).all()


def test_params_validation():
    with pytest.raises(ParameterError):
        BaselineParams(radius=0)
    with pytest.raises(ParameterError):
        BaselineParams(lam=0.0)
    with pytest.raises(ParameterError):
        BaselineParams(epsilon=-1.0)
    assert BaselineParams(dynamic_range=255.0).eps == pytest.approx(0.255 ** 2)


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        gif_filter(np.ones((4, 4)), np.ones((4, 5)), BaselineParams(radius=1))


@pytest.mark.parametrize("variant", ["GIF", "WGIF", "GGIF"])
def test_oracle_constant(variant):
    plane = np.full((6, 6), 0.25)
    out = naive_window_oracle(plane, plane, BaselineParams(radius=1, lam=0.1), variant)
    np.testing.assert_allclose(out, 0.25, atol=1e-14)


def test_oracle_epgif_forced_tau_one(rng):
    X = rng.random((8, 8))
    _, fields = naive_window_oracle(X, X, EpgifParams(radius=2, lam=0.5), "EPGIF",
                                    tau_override=1.0, return_fields=True)
    np.testing.assert_allclose(fields["a"], 1.0, rtol=0, atol=1e-12)
