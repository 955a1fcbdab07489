"""Brute-force per-window reference for every filter variant.

Every statistic is recomputed from explicit window slices with two-pass
means, the global weightings are literal double sums, and the EPGIF
aggregation weights come from the windowed mean of squared residuals
rather than the closed form. Quadratic or worse in the pixel count, so
keep inputs small (64x64 or less).
"""
from __future__ import annotations

import math

import numpy as np

from .edge_perceptual import EpgifParams
from .image import as_plane, check_same_shape

VARIANTS = ("GIF", "WGIF", "GGIF", "EPGIF")


def _windows(shape, radius):
    h, w = shape
    for y in range(h):
        for x in range(w):
            yield y, x, (slice(max(y - radius, 0), y + radius + 1), slice(max(x - radius, 0), x + radius + 1))


def _local_moments(X, G, radius):
    mx, mg, vx, vg, cov = (np.zeros_like(X) for _ in range(5))
    for y, x, win in _windows(X.shape, radius):
        px, pg = X[win], G[win]
        n = px.size
        mx[y, x] = px.sum() / n
        mg[y, x] = pg.sum() / n
        dx, dg = px - mx[y, x], pg - mg[y, x]
        vx[y, x] = (dx * dx).sum() / n
        vg[y, x] = (dg * dg).sum() / n
        cov[y, x] = (dg * dx).sum() / n
    return mx, mg, vx, vg, cov


def _variance(G, radius):
    return _local_moments(G, G, radius)[3]


def _double_sum_weighting(field, eps):
    flat = field.ravel()
    out = np.empty_like(flat)
    for i, v in enumerate(flat):
        out[i] = np.sum((v + eps) / (flat + eps)) / flat.size
    return out.reshape(field.shape)


def _spread_ok(mu, low):
    return (mu - low) > 16 * np.finfo(np.float64).eps * abs(mu)


def _gamma(chi):
    mu, low = chi.mean(), chi.min()
    if not _spread_ok(mu, low):
        return np.full(chi.shape, 0.5)
    out = np.empty_like(chi)
    for idx, v in np.ndenumerate(chi):
        z = 4.0 * (v - mu) / (mu - low)
        out[idx] = 1.0 - 1.0 / (1.0 + math.exp(z)) if z < 700 else 1.0
    return out


def _tau(alpha, c):
    mu, low = alpha.mean(), alpha.min()
    if not _spread_ok(mu, low):
        return np.zeros(alpha.shape)
    out = np.empty_like(alpha)
    for idx, v in np.ndenumerate(alpha):
        t = 0.5 * math.tanh(2.0 * (v - mu) / (mu - low)) + c
        if t <= 0.0:
            t = 0.0
        elif t >= c:
            t = c + (1.0 - c) * (t - c) / 0.5
        out[idx] = min(max(t, 0.0), 1.0)
    return out


def naive_window_oracle(X, G, params, variant: str = "GIF", tau_override=None, return_fields: bool = False):
    """Filter by direct evaluation of every window.

    Parameters
    ----------
    X, G : array_like
        Input and guidance planes (``G=None`` means self-guided).
    params : BaselineParams or EpgifParams
        Only ``radius``, ``lam`` and ``eps`` are read for GIF/WGIF/GGIF.
    variant : {"GIF", "WGIF", "GGIF", "EPGIF"}
    tau_override : float or array_like, optional
        EPGIF only: replace the computed edge constraint.
    return_fields : bool
        Also return a dict of the per-window fields.
    """
    variant = variant.upper()
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    X = as_plane(X, "X")
    G = X if G is None else as_plane(G, "G")
    check_same_shape(X, G)
    r, lam, eps = params.radius, params.lam, params.eps
    mx, mg, vx, vg, cov = _local_moments(X, G, r)
    fields = {}

    if variant == "GIF":
        a = cov / (vg + lam)
    elif variant == "WGIF":
        lam_eff = lam / _double_sum_weighting(_variance(G, 1), eps)
        a = cov / (vg + lam_eff)
    elif variant == "GGIF":
        chi = np.sqrt(_variance(G, 1)) * np.sqrt(_variance(G, r))
        lam_eff = lam / _double_sum_weighting(chi, eps)
        a = (cov + lam_eff * _gamma(chi)) / (vg + lam_eff)
    else:
        if not isinstance(params, EpgifParams):
            raise TypeError("EPGIF variant needs EpgifParams")
        v1, vz = _variance(G, 1), _variance(G, r)
        s1, sz = np.sqrt(v1).mean(), np.sqrt(vz).mean()
        phi = np.zeros_like(G) if s1 == 0 or sz == 0 else v1 * vz / (s1 * sz)
        psi = _double_sum_weighting(phi, eps)
        if tau_override is not None:
            tau = np.broadcast_to(np.asarray(tau_override, dtype=np.float64), G.shape).copy()
        else:
            if params.rho_mode == "unit":
                rho = np.ones_like(G)
            else:
                rho = np.abs(G - _local_moments(G, G, r)[1]) / params.dynamic_range
            tau = _tau(phi * rho, params.c)
        eta = 1.0 - tau
        lam_eff = lam / psi
        a = (eta * cov + lam_eff * tau) / (eta * vg + lam_eff)
        fields.update(psi=psi, tau=tau, eta=eta)

    b = mx - a * mg
    h, w = X.shape
    a_bar, b_bar = np.zeros_like(X), np.zeros_like(X)

    if variant == "EPGIF":
        mse = np.zeros_like(X)
        for y, x, win in _windows(X.shape, r):
            resid = eta[y, x] * (a[y, x] * G[win] + b[y, x] - X[win])
            mse[y, x] = (resid * resid).sum() / resid.size
        m = np.clip(mse / params.beta, 0.0, 700.0)
        weight = np.exp(m) if params.paper_literal_weight_sign else np.exp(-m)
        fields.update(mse=mse, w=weight)
    else:
        weight = np.ones_like(X)

    for y, x, win in _windows(X.shape, r):
        ww = weight[win]
        a_bar[y, x] = (ww * a[win]).sum() / ww.sum()
        b_bar[y, x] = (ww * b[win]).sum() / ww.sum()

    out = a_bar * G + b_bar
    if return_fields:
        fields.update(a=a, b=b, a_bar=a_bar, b_bar=b_bar)
        return out, fields
    return out
