"""Detail enhancement, multi-scale exposure fusion and row profiles."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import replace
from typing import Sequence

import numpy as np
from scipy import ndimage

from .edge_perceptual import EpgifParams, epgif_filter
from .errors import ParameterError, ShapeError
from .image import MultiPlaneImage, as_plane, to_luminance

FUSION_BETA = 1.0 / 50.0
WELL_EXPOSED_SIGMA = 0.2
WEIGHT_FLOOR = 1e-12
PYRAMID_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def _as_image(img) -> MultiPlaneImage:
    return img if isinstance(img, MultiPlaneImage) else MultiPlaneImage.from_array(img)


# -- detail enhancement -----------------------------------------------------

def detail_layer(X, params: EpgifParams = EpgifParams(), smoother=None) -> MultiPlaneImage:
    """Input minus its self-guided base layer, per plane (signed values kept).

    ``smoother(plane) -> plane`` replaces the EPGIF base filter when given.
    """
    X = _as_image(X)
    if smoother is None:
        def smoother(p):
            return epgif_filter(p, p, params)
    return X.map_planes(lambda p: p - smoother(p))


def detail_enhance(X, params: EpgifParams = EpgifParams(), amplification: float = 5.0,
                   smoother=None) -> MultiPlaneImage:
    """Add ``amplification`` times the detail layer back onto the input.

    Only the final image is clipped to ``[0, L]``.
    """
    if not amplification >= 0:
        raise ParameterError(f"amplification must be >= 0, got {amplification!r}")
    X = _as_image(X)
    if amplification == 0:
        return X.map_planes(np.copy)
    detail = detail_layer(X, params, smoother)
    L = X.dynamic_range
    planes = tuple(np.clip(x + amplification * d, 0.0, L) for x, d in zip(X.planes, detail.planes))
    return MultiPlaneImage(planes, L)


# -- exposure fusion ----------------------------------------------------------

def _check_sequence(seq: Sequence) -> list:
    frames = [_as_image(f) for f in seq]
    if not frames:
        raise ShapeError("exposure sequence is empty")
    shapes = {f.shape for f in frames}
    if len(shapes) > 1:
        raise ShapeError(f"frames differ in size: {sorted(shapes)}")
    if len({len(f) for f in frames}) > 1:
        raise ShapeError("frames differ in plane count")
    return frames


def normalize_weights(maps: Sequence[np.ndarray]) -> list:
    """Scale maps to sum to 1 per pixel; pixels where every map is 0 share equally."""
    stack = np.stack([np.asarray(m, dtype=np.float64) for m in maps])
    total = stack.sum(axis=0)
    empty = total <= 0
    out = stack / np.where(empty, 1.0, total)
    out[:, empty] = 1.0 / len(stack)
    return list(out)


def mertens_weights(seq: Sequence) -> list:
    """Contrast x saturation x well-exposedness per frame, normalized across frames."""
    frames = _check_sequence(seq)
    maps = []
    for frame in frames:
        lum = to_luminance(frame)
        contrast = np.abs(ndimage.laplace(lum, mode="reflect"))
        stack = np.stack(frame.planes)
        saturation = stack.std(axis=0) if len(frame) == 3 else np.zeros_like(lum)
        exposed = np.prod(np.exp(-((stack - 0.5) ** 2) / (2 * WELL_EXPOSED_SIGMA ** 2)), axis=0)
        # floor each factor so a zero contrast or saturation does not erase exposedness
        maps.append((contrast + WEIGHT_FLOOR) * (saturation + WEIGHT_FLOOR) * exposed)
    return normalize_weights(maps)


def smooth_weight_maps(weights: Sequence[np.ndarray], seq: Sequence, params: EpgifParams) -> list:
    """EPGIF-smooth each map under its frame's luminance, then renormalize."""
    frames = _check_sequence(seq)
    if len(weights) != len(frames):
        raise ShapeError("one weight map per frame required")
    smoothed = []
    for w, frame in zip(weights, frames):
        out = epgif_filter(as_plane(w, "weight map"), to_luminance(frame), params)
        smoothed.append(np.maximum(out, 0.0))
    return normalize_weights(smoothed)


def max_levels(shape: tuple[int, int]) -> int:
    return int(math.floor(math.log2(min(shape))))


def _blur(img: np.ndarray, scale: float = 1.0) -> np.ndarray:
    k = PYRAMID_KERNEL * scale
    return ndimage.convolve1d(ndimage.convolve1d(img, k, axis=0, mode="mirror"), k, axis=1, mode="mirror")


def pyr_down(img: np.ndarray) -> np.ndarray:
    return _blur(img)[::2, ::2]


def pyr_up(img: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Zero-stuff to ``shape`` and blur with the doubled kernel."""
    up = np.zeros(shape, dtype=np.float64)
    up[::2, ::2] = img[: (shape[0] + 1) // 2, : (shape[1] + 1) // 2]
    return _blur(up, 2.0)


def gaussian_pyramid(img, levels: int) -> list:
    img = as_plane(img)
    if levels < 1 or levels > max(1, max_levels(img.shape)):
        raise ParameterError(f"levels must be in [1, {max_levels(img.shape)}] for shape {img.shape}")
    pyr = [img]
    for _ in range(levels - 1):
        pyr.append(pyr_down(pyr[-1]))
    return pyr


def pyramid_roundtrip(img, levels: int) -> tuple[list, list]:
    """Gaussian and Laplacian pyramids of one plane, finest level first.

    Each Laplacian level stores the residual against the upsampled next
    level, so :func:`collapse` reconstructs the input up to rounding.
    """
    gauss = gaussian_pyramid(img, levels)
    lap = [g - pyr_up(g_next, g.shape) for g, g_next in zip(gauss[:-1], gauss[1:])]
    lap.append(gauss[-1])
    return gauss, lap


def laplacian_pyramid(img, levels: int) -> list:
    return pyramid_roundtrip(img, levels)[1]


def collapse(laplacian: Sequence[np.ndarray]) -> np.ndarray:
    out = laplacian[-1]
    for level in reversed(laplacian[:-1]):
        out = level + pyr_up(out, level.shape)
    return out


def exposure_fuse(seq: Sequence, params: EpgifParams | None = None, levels: int = 5) -> MultiPlaneImage:
    """Fuse a bracketed sequence in the Laplacian domain.

    Weight maps are smoothed at full resolution before their Gaussian
    pyramids are built. ``params`` defaults to EPGIF defaults with
    ``beta = 1/50``.
    """
    frames = _check_sequence(seq)
    if params is None:
        params = replace(EpgifParams(), beta=FUSION_BETA)
    weights = smooth_weight_maps(mertens_weights(frames), frames, params)
    weight_pyrs = [gaussian_pyramid(w, levels) for w in weights]
    L = frames[0].dynamic_range
    planes = []
    for c in range(len(frames[0])):
        fused = None
        for frame, wp in zip(frames, weight_pyrs):
            lap = laplacian_pyramid(frame.planes[c], levels)
            contrib = [w * l for w, l in zip(wp, lap)]
            fused = contrib if fused is None else [f + x for f, x in zip(fused, contrib)]
        planes.append(np.clip(collapse(fused), 0.0, L))
    return MultiPlaneImage(tuple(planes), L)


# -- 1-D profiles ---------------------------------------------------------------

def row_profile(X, outputs: Sequence[tuple[str, np.ndarray]], row: int) -> str:
    """CSV text with columns ``x,input,<name>...`` for one image row."""
    X = as_plane(X, "X")
    if not 0 <= row < X.shape[0]:
        raise ParameterError(f"row {row} outside [0, {X.shape[0]})")
    names = [name for name, _ in outputs]
    planes = [as_plane(p, name) for name, p in outputs]
    for p in planes:
        if p.shape != X.shape:
            raise ShapeError("profile outputs must match the input shape")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "input", *names])
    for x in range(X.shape[1]):
        writer.writerow([x, repr(float(X[row, x])), *(repr(float(p[row, x])) for p in planes)])
    return buf.getvalue()
