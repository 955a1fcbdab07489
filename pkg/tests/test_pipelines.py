import itertools

import numpy as np
import pytest

from epgif import MultiPlaneImage, synthetic
from epgif.baseline import BaselineParams, gif_filter
from epgif.edge_perceptual import EpgifParams, epgif_filter, epgif_run
from epgif.errors import ParameterError, ShapeError
from epgif.pipelines import (
    collapse,
    detail_enhance,
    detail_layer,
    exposure_fuse,
    gaussian_pyramid,
    mertens_weights,
    pyramid_roundtrip,
    row_profile,
    smooth_weight_maps,
)

FUSE = EpgifParams(radius=4, lam=0.01, beta=1 / 50)


# -- detail enhancement ---------------------------------------------------------------

def test_base_plus_detail_is_input(rng):
    X = rng.random((24, 24))
    params = EpgifParams(radius=3, lam=0.01)
    base = epgif_filter(X, X, params)
    detail = detail_layer(X, params).planes[0]
    assert np.array_equal(base + detail, X)


def test_detail_of_constant_is_zero():
    assert np.all(detail_layer(np.full((10, 10), 0.4), EpgifParams(radius=2)).planes[0] == 0)


def test_noise_detail_large_lambda(rng):
    X = 0.5 + 0.02 * rng.standard_normal((32, 32))
    # windows span the whole patch; as lambda grows a -> tau, so the detail
    # layer is (1 - a_bar) (X - mean), i.e. X - mean wherever tau vanishes
    params = EpgifParams(radius=32, lam=1e4)
    res = epgif_run(X, X, params)
    np.testing.assert_allclose(res.coeffs.a, res.constraint.tau, rtol=0, atol=1e-6)
    detail = detail_layer(X, params).planes[0]
    expected = (1.0 - res.coeffs.a_bar) * (X - X.mean())
    np.testing.assert_allclose(detail, expected, rtol=0, atol=1e-12)


def test_amplification_zero_is_identity(rng):
    X = np.moveaxis(rng.random((3, 16, 16)), 0, -1)
    out = detail_enhance(X, EpgifParams(radius=2), amplification=0)
    assert np.array_equal(out.to_array(), X)


def test_forced_base_is_identity(rng):
    X = rng.random((16, 16))
    out = detail_enhance(X, amplification=5, smoother=lambda p: p)
    assert np.array_equal(out.planes[0], X)


def test_negative_amplification():
    with pytest.raises(ParameterError):
        detail_enhance(np.ones((8, 8)), amplification=-1)


def test_enhance_boosts_texture_keeps_step():
    X = synthetic.textured_step(96)
    out = detail_enhance(X, EpgifParams(radius=4, lam=0.01), 5).planes[0]
    flat = (slice(20, 76), slice(8, 36))
    gain = out[flat].std() / X[flat].std()
    assert 5.0 < gain < 7.0
    step_in = X[:, 52:60].mean() - X[:, 36:44].mean()
    step_out = out[:, 52:60].mean() - out[:, 36:44].mean()
    assert abs(step_out / step_in - 1) < 0.05
    assert out.min() >= 0 and out.max() <= 1


# -- weights ---------------------------------------------------------------------------

def test_single_frame_weight_is_one(rng):
    (w,) = mertens_weights([rng.random((12, 12))])
    assert np.all(w == 1.0)


def test_identical_frames_share_weight(rng):
    f = np.moveaxis(rng.random((3, 12, 12)), 0, -1)
    for w in mertens_weights([f, f.copy()]):
        np.testing.assert_allclose(w, 0.5, atol=1e-15)


def test_well_exposed_frame_dominates():
    wa, wb = mertens_weights([np.full((8, 8), 0.5), np.full((8, 8), 0.95)])
    assert np.all(wa > 0.5)
    np.testing.assert_allclose(wa + wb, 1.0, atol=1e-12)


def test_weights_nonnegative_and_sum_to_one():
    frames = synthetic.bracketed_pair(48)
    maps = mertens_weights(frames)
    smooth = smooth_weight_maps(maps, frames, FUSE)
    for group in (maps, smooth):
        assert all(np.all(m >= 0) for m in group)
        np.testing.assert_allclose(sum(group), 1.0, rtol=0, atol=1e-9)


def test_constant_maps_unchanged():
    frames = [np.full((16, 16), 0.3), np.full((16, 16), 0.7)]
    maps = [np.full((16, 16), 0.25), np.full((16, 16), 0.75)]
    out = smooth_weight_maps(maps, frames, FUSE)
    np.testing.assert_allclose(out[0], 0.25, atol=1e-12)
    np.testing.assert_allclose(out[1], 0.75, atol=1e-12)


def _crossing(profile):
    i = int(np.argmax(profile >= 0.5))
    lo, hi = profile[i - 1], profile[i]
    return i - 1 + (0.5 - lo) / (hi - lo)


@pytest.mark.parametrize("offset", [0, 1])
def test_binary_map_aligns_with_guidance_edge(offset):
    G = synthetic.step(48, 0.2, 0.8, column=24)
    binary = np.zeros((48, 48))
    binary[:, 24 - offset:] = 1.0
    w, _ = smooth_weight_maps([binary, 1.0 - binary], [G, 1.0 - G], FUSE)
    assert abs(_crossing(w[24]) - 23.5) <= 1.0


def test_weight_errors():
    with pytest.raises(ShapeError):
        mertens_weights([np.ones((8, 8)), np.ones((8, 9))])
    with pytest.raises(ShapeError):
        mertens_weights([])
    with pytest.raises(ShapeError):
        smooth_weight_maps([np.ones((8, 8))], [np.ones((8, 8))] * 2, FUSE)


# -- pyramids --------------------------------------------------------------------------

@pytest.mark.parametrize("levels", [1, 2, 3, 4])
def test_pyramid_roundtrip(rng, levels):
    img = rng.random((64, 64))
    gauss, lap = pyramid_roundtrip(img, levels)
    assert len(gauss) == len(lap) == levels
    assert np.abs(collapse(lap) - img).max() <= 1e-6


def test_pyramid_odd_sizes(rng):
    img = rng.random((37, 53))
    gauss, lap = pyramid_roundtrip(img, 4)
    assert [g.shape for g in gauss] == [(37, 53), (19, 27), (10, 14), (5, 7)]
    assert np.abs(collapse(lap) - img).max() <= 1e-6


def test_single_level_pyramid(rng):
    img = rng.random((16, 16))
    _, lap = pyramid_roundtrip(img, 1)
    assert np.array_equal(lap[0], img) and np.array_equal(collapse(lap), img)


def test_constant_pyramid():
    _, lap = pyramid_roundtrip(np.full((32, 32), 0.6), 4)
    for level in lap[:-1]:
        assert np.abs(level).max() <= 1e-15
    np.testing.assert_allclose(lap[-1], 0.6, atol=1e-15)


def test_too_many_levels():
    with pytest.raises(ParameterError):
        gaussian_pyramid(np.ones((16, 16)), 5)
    with pytest.raises(ParameterError):
        gaussian_pyramid(np.ones((16, 16)), 0)


# -- fusion ----------------------------------------------------------------------------

def test_single_frame_fuse(rng):
    f = np.moveaxis(rng.random((3, 32, 32)), 0, -1)
    out = exposure_fuse([f], FUSE, levels=4).to_array()
    assert np.abs(out - f).max() <= 1e-6


def test_identical_frames_fuse(rng):
    f = rng.random((32, 32))
    out = exposure_fuse([f, f, f], FUSE, levels=4).planes[0]
    assert np.abs(out - f).max() <= 1e-6


def test_fuse_permutation_invariant():
    dark, bright = synthetic.bracketed_pair(48)
    mid = np.clip(0.5 * (dark + bright), 0, 1)
    frames = [dark, mid, bright]
    ref = exposure_fuse(frames, FUSE, levels=4).to_array()
    for perm in itertools.permutations(frames):
        out = exposure_fuse(list(perm), FUSE, levels=4).to_array()
        assert np.abs(out - ref).max() <= 1e-9


def test_bracketed_pair_within_input_range():
    dark, bright = synthetic.bracketed_pair(64)
    out = exposure_fuse([dark, bright], EpgifParams(radius=8, lam=0.01, beta=1 / 50), levels=4).to_array()
    lo, hi = np.minimum(dark, bright), np.maximum(dark, bright)
    inside = (out >= lo - 1e-12) & (out <= hi + 1e-12)
    assert inside.mean() >= 0.99


def test_fuse_size_mismatch():
    with pytest.raises(ShapeError):
        exposure_fuse([np.ones((16, 16)), np.ones((16, 18))])


def test_fuse_accepts_multiplane_images(rng):
    f = MultiPlaneImage.from_array(rng.random((16, 16)))
    assert exposure_fuse([f], FUSE, levels=3).shape == (16, 16)


# -- profiles ------------------------------------------------------------------------------

def test_profile_constant_and_input_only():
    X = np.full((4, 6), 0.25)
    lines = row_profile(X, [("f", X.copy())], 2).splitlines()
    assert lines[0] == "x,input,f" and len(lines) == 7
    assert all(line.split(",")[1] == line.split(",")[2] == "0.25" for line in lines[1:])
    assert row_profile(X, [], 0).splitlines()[0] == "x,input"


def test_profile_row_errors():
    with pytest.raises(ParameterError):
        row_profile(np.ones((4, 4)), [], 4)
    with pytest.raises(ShapeError):
        row_profile(np.ones((4, 4)), [("f", np.ones((4, 5)))], 0)


def test_step_profile_epgif_beats_gif():
    X = synthetic.step(128)
    ep = epgif_filter(X, X, EpgifParams(radius=16, lam=1.0))
    gf = gif_filter(X, X, BaselineParams(radius=16, lam=1.0))
    cols = slice(56, 72)
    dev_ep = np.abs(ep[64, cols] - X[64, cols]).max()
    dev_gf = np.abs(gf[64, cols] - X[64, cols]).max()
    assert dev_ep < dev_gf
    assert dev_ep < 0.01
