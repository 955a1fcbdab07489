"""GIF, WGIF and GGIF on the shared windowed-statistics core.

All three solve the same per-window ridge regression of the input on the
guidance and differ only in how the regularizer is weighted and what the
slope is pulled toward. Coefficients are averaged with a plain box mean.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ParameterError
from .image import as_plane, check_same_shape
from .stats import box_mean, local_stddev, local_variance, window_stats


def default_epsilon(dynamic_range: float = 1.0) -> float:
    return (0.001 * dynamic_range) ** 2


@dataclass(frozen=True)
class BaselineParams:
    """Window radius, regularization strength and weighting floor."""

    radius: int = 16
    lam: float = 0.01
    epsilon: float | None = None
    dynamic_range: float = 1.0

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 1:
            raise ParameterError(f"radius must be an integer >= 1, got {self.radius!r}")
        if not self.lam > 0:
            raise ParameterError(f"lambda must be > 0, got {self.lam!r}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon!r}")
        if not self.dynamic_range > 0:
            raise ParameterError("dynamic_range must be > 0")

    @property
    def eps(self) -> float:
        return default_epsilon(self.dynamic_range) if self.epsilon is None else self.epsilon


def _inputs(X, G):
    X = as_plane(X, "X")
    G = X if G is None else as_plane(G, "G")
    check_same_shape(X, G)
    return X, G


def _normalized_weighting(field: np.ndarray, eps: float) -> np.ndarray:
    # (f(p') + eps) * mean_p 1 / (f(p) + eps)
    shifted = field + eps
    return shifted * np.mean(1.0 / shifted)


def _mean_aggregate(a, b, G, radius):
    return box_mean(a, radius) * G + box_mean(b, radius)


def gif_coeffs(X, G, params: BaselineParams):
    """Per-window slope and offset of the original guided filter."""
    X, G = _inputs(X, G)
    st = window_stats(X, G, params.radius)
    a = st.cov_gx / (st.var_g + params.lam)
    return a, st.mean_x - a * st.mean_g


def gif_filter(X, G=None, params: BaselineParams = BaselineParams()) -> np.ndarray:
    """Guided image filter with box-mean coefficient averaging.

    Parameters
    ----------
    X : array_like
        Input plane.
    G : array_like, optional
        Guidance plane; defaults to ``X``.
    params : BaselineParams

    Returns
    -------
    numpy.ndarray
        Filtered plane ``mean(a) * G + mean(b)``.
    """
    X, G = _inputs(X, G)
    a, b = gif_coeffs(X, G, params)
    return _mean_aggregate(a, b, G, params.radius)


def wgif_weighting(G, epsilon: float) -> np.ndarray:
    """Edge-aware weighting from 3x3 local variances, strictly positive."""
    if not epsilon > 0:
        raise ParameterError("epsilon must be > 0")
    return _normalized_weighting(local_variance(as_plane(G, "G"), 1), epsilon)


def wgif_filter(X, G=None, params: BaselineParams = BaselineParams()) -> np.ndarray:
    X, G = _inputs(X, G)
    st = window_stats(X, G, params.radius)
    lam_eff = params.lam / wgif_weighting(G, params.eps)
    a = st.cov_gx / (st.var_g + lam_eff)
    b = st.mean_x - a * st.mean_g
    return _mean_aggregate(a, b, G, params.radius)


def ggif_chi(G, radius: int) -> np.ndarray:
    """Product of local standard deviations at radius 1 and ``radius``."""
    G = as_plane(G, "G")
    return local_stddev(G, 1) * local_stddev(G, radius)


def ggif_weighting(G, radius: int, epsilon: float) -> np.ndarray:
    if not epsilon > 0:
        raise ParameterError("epsilon must be > 0")
    if radius < 1:
        raise ParameterError("radius must be >= 1")
    return _normalized_weighting(ggif_chi(G, radius), epsilon)


def degenerate_spread(mean: float, low: float) -> bool:
    """True when a field is constant up to rounding (no usable sigmoid scale)."""
    return not (mean - low) > 16 * np.finfo(np.float64).eps * abs(mean)


def ggif_gamma(chi) -> np.ndarray:
    """Sigmoid edge constraint centred on the global mean of ``chi``.

    A constant ``chi`` has no scale; every pixel then gets 1/2.
    """
    chi = np.asarray(chi, dtype=np.float64)
    mu, low = float(chi.mean()), float(chi.min())
    if degenerate_spread(mu, low):
        return np.full(chi.shape, 0.5)
    # 1 - 1 / (1 + e^z) is the logistic function of z
    return expit(4.0 * (chi - mu) / (mu - low))


def ggif_filter(X, G=None, params: BaselineParams = BaselineParams()) -> np.ndarray:
    X, G = _inputs(X, G)
    st = window_stats(X, G, params.radius)
    chi = ggif_chi(G, params.radius)
    lam_eff = params.lam / _normalized_weighting(chi, params.eps)
    gamma = ggif_gamma(chi)
    a = (st.cov_gx + lam_eff * gamma) / (st.var_g + lam_eff)
    b = st.mean_x - a * st.mean_g
    return _mean_aggregate(a, b, G, params.radius)
