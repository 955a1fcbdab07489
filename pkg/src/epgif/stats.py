"""Windowed statistics in O(N) via box sums.

Windows are truncated at the image border and every mean is normalized by
the number of pixels actually inside the window.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._box import box_sum
from .errors import ParameterError
from .image import as_plane, check_same_shape


def _check_radius(radius) -> int:
    if int(radius) != radius or radius < 0:
        raise ParameterError(f"radius must be a nonnegative integer, got {radius!r}")
    return int(radius)


def window_counts(shape: tuple[int, int], radius: int) -> np.ndarray:
    """Number of in-bounds pixels in each truncated window."""
    h, w = shape

    def axis_count(n):
        idx = np.arange(n)
        return (np.minimum(idx + radius, n - 1) - np.maximum(idx - radius, 0) + 1).astype(np.float64)

    return np.outer(axis_count(h), axis_count(w))


def _midrange(plane: np.ndarray) -> float:
    return 0.5 * (float(plane.min()) + float(plane.max()))


def box_mean(img, radius: int) -> np.ndarray:
    """Mean over the truncated (2r+1)x(2r+1) window around every pixel.

    The plane is shifted by its midrange before summing, which keeps
    constant planes exact and reduces cancellation in the prefix sums.
    """
    radius = _check_radius(radius)
    plane = as_plane(img)
    ref = _midrange(plane)
    return ref + box_sum(plane - ref, radius) / window_counts(plane.shape, radius)


@dataclass(frozen=True)
class WindowStats:
    mean_x: np.ndarray
    mean_g: np.ndarray
    var_x: np.ndarray
    var_g: np.ndarray
    cov_gx: np.ndarray
    radius: int


def window_stats(X, G, radius: int) -> WindowStats:
    """Local means, variances and the guidance/input covariance."""
    radius = _check_radius(radius)
    X = as_plane(X, "X")
    G = as_plane(G, "G")
    check_same_shape(X, G)
    counts = window_counts(X.shape, radius)
    x0, g0 = _midrange(X), _midrange(G)
    xc, gc = X - x0, G - g0

    def mean(a):
        return box_sum(a, radius) / counts

    mxc, mgc = mean(xc), mean(gc)
    var_x = np.maximum(mean(xc * xc) - mxc * mxc, 0.0)
    if G is X or np.array_equal(G, X):
        var_g = var_x
        cov = var_x.copy()
    else:
        var_g = np.maximum(mean(gc * gc) - mgc * mgc, 0.0)
        cov = mean(gc * xc) - mgc * mxc
    return WindowStats(mxc + x0, mgc + g0, var_x, var_g, cov, radius)


def local_variance(img, radius: int) -> np.ndarray:
    """Clamped local variance of one plane."""
    radius = _check_radius(radius)
    plane = as_plane(img)
    counts = window_counts(plane.shape, radius)
    c = plane - _midrange(plane)
    m = box_sum(c, radius) / counts
    return np.maximum(box_sum(c * c, radius) / counts - m * m, 0.0)


def local_stddev(img, radius: int) -> np.ndarray:
    return np.sqrt(local_variance(img, radius))
