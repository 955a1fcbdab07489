"""Numpy fallback for the compiled box kernel.

Window sums use block prefix/suffix sums: the axis is zero-padded and cut
into blocks of the window length ``k = 2r + 1``; a window starting inside
a block is that block's suffix plus the next block's prefix. Every term
lies inside the window, so there is no cancellation between far-apart
values and the cost does not depend on the radius.
"""
from __future__ import annotations

import numpy as np


def _axis_sum(arr: np.ndarray, radius: int) -> np.ndarray:
    """Truncated-window sums along axis 0."""
    n = arr.shape[0]
    r = min(radius, n - 1)
    k = 2 * r + 1
    nblocks = -(-(n + 2 * r) // k) + 1
    m = nblocks * k
    padded = np.zeros((m,) + arr.shape[1:], dtype=np.float64)
    padded[r:r + n] = arr
    blocks = padded.reshape((nblocks, k) + arr.shape[1:])
    prefix = np.cumsum(blocks, axis=1).reshape(padded.shape)
    suffix = np.cumsum(blocks[:, ::-1], axis=1)[:, ::-1].reshape(padded.shape)
    start = np.arange(n)
    out = prefix[start + k - 1].copy()
    inner = start % k != 0
    out[inner] += suffix[start[inner]]
    return out


def box_sum(img, radius: int) -> np.ndarray:
    """Sum of ``img`` over the (2r+1)x(2r+1) window clipped to the image."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    arr = np.asarray(img, dtype=np.float64)
    if arr.size == 0:
        return arr.copy()
    return _axis_sum(_axis_sum(arr, radius).T, radius).T.copy()
