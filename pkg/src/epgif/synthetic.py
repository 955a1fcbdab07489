"""Seeded synthetic scenes used by the tests, benchmarks and ``epgif synth``."""
from __future__ import annotations

import numpy as np


def mosaic(size: int = 128, rects: int = 6, seed: int = 0) -> np.ndarray:
    """Piecewise-constant plane: a background level plus overlapping rectangles."""
    rng = np.random.default_rng(seed)
    img = np.full((size, size), rng.uniform(0.2, 0.8))
    for _ in range(rects):
        y0, x0 = rng.integers(0, size - 8, 2)
        h, w = rng.integers(8, size // 2, 2)
        img[y0:y0 + h, x0:x0 + w] = rng.uniform(0.15, 0.85)
    return img


def add_noise(clean: np.ndarray, sigma: float = 0.05, seed: int = 0, L: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.clip(clean + rng.normal(0.0, sigma * L, clean.shape), 0.0, L)


def step(size: int = 64, low: float = 0.2, high: float = 0.8, column: int | None = None) -> np.ndarray:
    """Vertical step edge between ``column - 1`` and ``column``."""
    img = np.full((size, size), low)
    img[:, size // 2 if column is None else column:] = high
    return img


def textured_step(size: int = 96, amplitude: float = 0.03, seed: int = 0) -> np.ndarray:
    """Step edge plus fine sinusoidal texture, kept inside [0, 1]."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[:size, :size]
    texture = amplitude * np.sin(2 * np.pi * x / 4.0 + rng.uniform(0, 2 * np.pi)) * np.sin(2 * np.pi * y / 5.0)
    return np.clip(step(size, 0.3, 0.7) + texture, 0.0, 1.0)


def bracketed_pair(size: int = 64, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Dark and bright renderings of one smooth RGB scene, channel-last."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[:size, :size] / size
    radiance = np.stack([
        0.5 + 0.4 * np.sin(2 * np.pi * (x + rng.uniform())),
        0.5 + 0.4 * np.cos(2 * np.pi * (y + rng.uniform())),
        0.2 + 0.6 * x * y,
    ], axis=-1)
    radiance *= np.where(x > 0.5, 2.5, 0.6)[..., None]
    dark = np.clip(0.5 * radiance, 0.0, 1.0)
    bright = np.clip(2.0 * radiance, 0.0, 1.0)
    return dark, bright
