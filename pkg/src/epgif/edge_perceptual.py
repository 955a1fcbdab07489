"""Enhanced edge-perceptual guided image filter (EPGIF).

Compared with GGIF the filter changes three things:

* the regularizer weighting ``psi`` is built from the product of local
  variances at two scales, normalized by the image-wide mean standard
  deviations;
* the slope is pulled toward a piecewise-tanh target ``tau`` that spans
  exactly [0, 1], and the data term is scaled by ``eta = 1 - tau``, so
  ``a == 1`` wherever ``tau == 1`` whatever ``lam`` is;
* overlapping-window coefficients are averaged with weights that decay
  with each window's mean squared residual.

Every stage is a handful of box sums, so the cost is O(N) in the number
of pixels and independent of the radius.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._box import box_sum
from .baseline import default_epsilon, degenerate_spread
from .errors import ParameterError
from .image import as_plane, check_same_shape
from .stats import WindowStats, box_mean, local_variance, window_stats

RHO_MODES = ("unit", "luminance-contrast")
MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class EpgifParams:
    radius: int = 16
    lam: float = 0.01
    c: float = 0.35
    beta: float = 1.0 / 500.0
    epsilon: float | None = None
    rho_mode: str = "unit"
    dynamic_range: float = 1.0
    # exp(+M) instead of exp(-M) for the aggregation weight; comparison only
    paper_literal_weight_sign: bool = False

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 1:
            raise ParameterError(f"radius must be an integer >= 1, got {self.radius!r}")
        if not self.lam > 0:
            raise ParameterError(f"lambda must be > 0, got {self.lam!r}")
        if not 0 < self.c < 0.5:
            raise ParameterError(f"c must lie in (0, 0.5), got {self.c!r}")
        if not self.beta > 0:
            raise ParameterError(f"beta must be > 0, got {self.beta!r}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon!r}")
        if self.rho_mode not in RHO_MODES:
            raise ParameterError(f"rho_mode must be one of {RHO_MODES}, got {self.rho_mode!r}")
        if not self.dynamic_range > 0:
            raise ParameterError("dynamic_range must be > 0")

    @property
    def eps(self) -> float:
        return default_epsilon(self.dynamic_range) if self.epsilon is None else self.epsilon


@dataclass(frozen=True)
class EdgeWeightField:
    radius: int
    sigma2_1: np.ndarray
    sigma2_zeta: np.ndarray
    sbar_1: float
    sbar_zeta: float
    phi: np.ndarray
    psi: np.ndarray | None = None


@dataclass(frozen=True)
class ConstraintField:
    alpha: np.ndarray
    tau: np.ndarray
    eta: np.ndarray


@dataclass(frozen=True)
class AggregationField:
    a: np.ndarray
    b: np.ndarray
    w: np.ndarray | None = None
    a_bar: np.ndarray | None = None
    b_bar: np.ndarray | None = None


def compute_phi(G, radius: int) -> EdgeWeightField:
    """Two-scale variance product over the mean local standard deviations.

    A flat guidance has zero mean deviation; ``phi`` is then all zeros.
    """
    G = as_plane(G, "G")
    if radius < 1:
        raise ParameterError("radius must be >= 1")
    v1 = local_variance(G, 1)
    vz = local_variance(G, radius)
    s1 = float(np.mean(np.sqrt(v1)))
    sz = float(np.mean(np.sqrt(vz)))
    if s1 == 0.0 or sz == 0.0:
        phi = np.zeros_like(G)
    else:
        phi = v1 * vz / (s1 * sz)
    return EdgeWeightField(radius, v1, vz, s1, sz, phi)


def compute_psi(G, radius: int, epsilon: float) -> EdgeWeightField:
    """Edge-aware weighting ``(phi(p') + eps) * mean_p 1 / (phi(p) + eps)``."""
    if not epsilon > 0:
        raise ParameterError("epsilon must be > 0")
    field = compute_phi(G, radius)
    shifted = field.phi + epsilon
    return replace(field, psi=shifted * np.mean(1.0 / shifted))


def tau_from_alpha(alpha, c: float = 0.35) -> np.ndarray:
    """Map ``alpha`` through the shifted tanh curve and its piecewise stretch.

    Values at or below the global mean of ``alpha`` land in [0, c]; the
    range above is stretched linearly onto [c, 1]. A constant ``alpha``
    yields all zeros.
    """
    if not 0 < c < 0.5:
        raise ParameterError(f"c must lie in (0, 0.5), got {c!r}")
    alpha = np.asarray(alpha, dtype=np.float64)
    mu, low = float(alpha.mean()), float(alpha.min())
    if degenerate_spread(mu, low):
        return np.zeros(alpha.shape)
    raw = 0.5 * np.tanh(2.0 * (alpha - mu) / (mu - low)) + c
    tau = np.where(raw >= c, c + (1.0 - c) * (raw - c) / 0.5, raw)
    tau = np.where(raw <= 0.0, 0.0, tau)
    return np.clip(tau, 0.0, 1.0)


def rho_field(G, radius: int, rho_mode: str = "unit", dynamic_range: float = 1.0) -> np.ndarray:
    G = as_plane(G, "G")
    if rho_mode == "unit":
        return np.ones_like(G)
    if rho_mode == "luminance-contrast":
        return np.abs(G - box_mean(G, radius)) / dynamic_range
    raise ParameterError(f"rho_mode must be one of {RHO_MODES}, got {rho_mode!r}")


def compute_tau(G, field: EdgeWeightField, c: float = 0.35, rho_mode: str = "unit",
                dynamic_range: float = 1.0) -> ConstraintField:
    alpha = field.phi * rho_field(G, field.radius, rho_mode, dynamic_range)
    tau = tau_from_alpha(alpha, c)
    return ConstraintField(alpha, tau, 1.0 - tau)


def epgif_coeffs(stats: WindowStats, cons: ConstraintField, psi, lam: float) -> AggregationField:
    """Per-window slope and offset.

    ``a = (eta * cov + (lam / psi) * tau) / (eta * var_g + lam / psi)``;
    the offset makes each window's fit pass through the local means.
    """
    if not lam > 0:
        raise ParameterError(f"lambda must be > 0, got {lam!r}")
    lam_eff = lam / psi
    eta, tau = cons.eta, cons.tau
    a = (eta * stats.cov_gx + lam_eff * tau) / (eta * stats.var_g + lam_eff)
    return AggregationField(a, stats.mean_x - a * stats.mean_g)


def residual_exponent(field: AggregationField, cons: ConstraintField, stats: WindowStats,
                      psi, lam: float, beta: float) -> np.ndarray:
    """Closed-form mean squared (eta-scaled) residual of each window, over ``beta``."""
    a, tau, eta = field.a, cons.tau, cons.eta
    misfit = eta * eta * (stats.var_x - a * a * stats.var_g) - 2.0 * a * (a - tau) * (lam / psi) * eta
    return misfit / beta


def residual_weight(field: AggregationField, cons: ConstraintField, stats: WindowStats,
                    psi, lam: float, beta: float, literal_sign: bool = False) -> AggregationField:
    if not beta > 0:
        raise ParameterError(f"beta must be > 0, got {beta!r}")
    m = np.clip(residual_exponent(field, cons, stats, psi, lam, beta), 0.0, MAX_EXPONENT)
    return replace(field, w=np.exp(m if literal_sign else -m))


def weighted_aggregate(field: AggregationField, radius: int) -> AggregationField:
    """Weighted means of ``a`` and ``b`` over every window covering each pixel."""
    if field.w is None:
        raise ValueError("aggregation weights missing; run residual_weight first")
    w = field.w
    w_sum = box_sum(w, radius)

    def wmean(v):
        # offset by the midrange so constant fields come back exactly
        ref = 0.5 * (float(v.min()) + float(v.max()))
        return ref + box_sum(w * (v - ref), radius) / w_sum

    return replace(field, a_bar=wmean(field.a), b_bar=wmean(field.b))


@dataclass(frozen=True)
class EpgifResult:
    output: np.ndarray
    stats: WindowStats
    edge: EdgeWeightField
    constraint: ConstraintField
    coeffs: AggregationField


def epgif_run(X, G=None, params: EpgifParams = EpgifParams()) -> EpgifResult:
    """Run the filter and keep every intermediate field."""
    X = as_plane(X, "X")
    G = X if G is None else as_plane(G, "G")
    check_same_shape(X, G)
    r = params.radius
    st = window_stats(X, G, r)
    edge = compute_psi(G, r, params.eps)
    cons = compute_tau(G, edge, params.c, params.rho_mode, params.dynamic_range)
    coeffs = epgif_coeffs(st, cons, edge.psi, params.lam)
    coeffs = residual_weight(coeffs, cons, st, edge.psi, params.lam, params.beta,
                             params.paper_literal_weight_sign)
    coeffs = weighted_aggregate(coeffs, r)
    out = coeffs.a_bar * G + coeffs.b_bar
    return EpgifResult(out, st, edge, cons, coeffs)


def epgif_filter(X, G=None, params: EpgifParams = EpgifParams()) -> np.ndarray:
    """Edge-preserving smoothing of ``X`` steered by ``G`` (self-guided if omitted).

    Parameters
    ----------
    X : array_like
        Input plane.
    G : array_like, optional
        Guidance plane of the same shape.
    params : EpgifParams
        Radius, regularization ``lam``, tanh offset ``c``, residual scale
        ``beta`` and weighting floor ``epsilon``.

    Returns
    -------
    numpy.ndarray
        Filtered plane.
    """
    return epgif_run(X, G, params).output


def _minmax(field: np.ndarray) -> np.ndarray:
    lo, hi = float(field.min()), float(field.max())
    if hi <= lo:
        return np.zeros_like(field)
    return (field - lo) / (hi - lo)


def dump_diagnostics(G, X=None, params: EpgifParams = EpgifParams()) -> dict:
    """Intermediate fields for inspection.

    Returns a dict with raw ``psi``, ``tau``, ``eta``, ``w`` and ``a_bar``
    planes plus ``<name>_normalized`` min-max scaled copies.
    """
    G = as_plane(G, "G")
    X = G if X is None else X
    res = epgif_run(X, G, params)
    raw = {
        "psi": res.edge.psi,
        "tau": res.constraint.tau,
        "eta": res.constraint.eta,
        "w": res.coeffs.w,
        "a_bar": res.coeffs.a_bar,
    }
    out = dict(raw)
    for name, field in raw.items():
        out[f"{name}_normalized"] = _minmax(field)
    return out
