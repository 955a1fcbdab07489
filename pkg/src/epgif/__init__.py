"""Guided image filters (GIF, WGIF, GGIF, EPGIF) with O(N) box statistics."""
from ._box import BACKEND
from .errors import ImageFormatError, ParameterError, RangeError, ShapeError
from .image import MultiPlaneImage, load_image, save_image, to_luminance
from .stats import WindowStats, box_mean, local_stddev, local_variance, window_stats

__all__ = [
    "BACKEND",
    "ImageFormatError",
    "MultiPlaneImage",
    "ParameterError",
    "RangeError",
    "ShapeError",
    "WindowStats",
    "box_mean",
    "load_image",
    "local_stddev",
    "local_variance",
    "save_image",
    "to_luminance",
    "window_stats",
]
