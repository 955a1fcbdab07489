"""Image containers and PNG / PGM / PPM file I/O.

Planes are 2-D ``float64`` numpy arrays. Files are mapped to ``[0, 1]`` on
load, so loaded images carry a dynamic range ``L = 1``.
"""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import cv2
import numpy as np

from .errors import ImageFormatError, RangeError, ShapeError

SUPPORTED_SUFFIXES = {".png", ".pgm", ".ppm", ".pnm"}
_SCALES = {np.dtype(np.uint8): 255.0, np.dtype(np.uint16): 65535.0}


def as_plane(arr, name: str = "plane") -> np.ndarray:
    """Validate and convert ``arr`` to a finite 2-D float64 array."""
    plane = np.asarray(arr, dtype=np.float64)
    if plane.ndim != 2 or plane.shape[0] < 1 or plane.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {plane.shape}")
    if not np.all(np.isfinite(plane)):
        raise ValueError(f"{name} contains NaN or Inf")
    return plane


def check_same_shape(*planes: np.ndarray) -> None:
    shapes = {p.shape for p in planes}
    if len(shapes) > 1:
        raise ShapeError(f"dimension mismatch: {sorted(shapes)}")


@dataclass(frozen=True)
class MultiPlaneImage:
    """One (gray) or three (RGB) planes sharing dimensions and dynamic range."""

    planes: tuple
    dynamic_range: float = 1.0

    def __post_init__(self):
        planes = tuple(as_plane(p, "plane") for p in self.planes)
        if not planes:
            raise ShapeError("image needs at least one plane")
        check_same_shape(*planes)
        if self.dynamic_range <= 0:
            raise ValueError("dynamic_range must be positive")
        object.__setattr__(self, "planes", planes)

    @classmethod
    def from_array(cls, arr, dynamic_range: float = 1.0) -> "MultiPlaneImage":
        """Build from an ``(H, W)`` or channel-last ``(H, W, C)`` array."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 2:
            return cls((arr,), dynamic_range)
        if arr.ndim == 3:
            return cls(tuple(arr[..., k] for k in range(arr.shape[2])), dynamic_range)
        raise ShapeError(f"expected 2-D or 3-D array, got shape {arr.shape}")

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.planes[0].shape

    def __len__(self) -> int:
        return len(self.planes)

    def to_array(self) -> np.ndarray:
        if len(self.planes) == 1:
            return self.planes[0].copy()
        return np.stack(self.planes, axis=-1)

    def map_planes(self, fn) -> "MultiPlaneImage":
        return MultiPlaneImage(tuple(fn(p) for p in self.planes), self.dynamic_range)


def _check_suffix(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix not in SUPPORTED_SUFFIXES:
        raise ImageFormatError(f"unsupported image format {suffix!r} ({path})")
    return suffix


def load_image(path) -> MultiPlaneImage:
    """Read an 8- or 16-bit PNG / PGM / PPM file into planes scaled to [0, 1].

    Alpha channels are dropped. Color files come back in RGB order.
    """
    path = Path(path)
    _check_suffix(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    data = cv2.imdecode(np.frombuffer(raw, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if data is None:
        raise ImageFormatError(f"cannot decode {path}")
    scale = _SCALES.get(data.dtype)
    if scale is None:
        raise ImageFormatError(f"unsupported sample type {data.dtype} in {path}")
    values = data.astype(np.float64) / scale
    if values.ndim == 2:
        return MultiPlaneImage((values,), 1.0)
    channels = values.shape[2]
    if channels in (1, 2):
        return MultiPlaneImage((values[..., 0],), 1.0)
    if channels in (3, 4):
        # stored as BGR(A)
        return MultiPlaneImage((values[..., 2], values[..., 1], values[..., 0]), 1.0)
    raise ImageFormatError(f"unsupported channel count {channels} in {path}")


def quantize(plane: np.ndarray, dynamic_range: float, bit_depth: int = 8, clamp: bool = False) -> np.ndarray:
    """Scale ``[0, L]`` values to integers, rounding half away from zero."""
    if bit_depth not in (8, 16):
        raise ImageFormatError(f"unsupported bit depth {bit_depth}")
    plane = np.asarray(plane, dtype=np.float64)
    if clamp:
        plane = np.clip(plane, 0.0, dynamic_range)
    elif plane.min() < 0.0 or plane.max() > dynamic_range:
        raise RangeError(
            f"values in [{plane.min():g}, {plane.max():g}] exceed [0, {dynamic_range:g}]; pass clamp=True"
        )
    top = 255.0 if bit_depth == 8 else 65535.0
    scaled = plane / dynamic_range * top
    # values are nonnegative here, so floor(x + 0.5) rounds half away from zero
    ints = np.floor(scaled + 0.5)
    return ints.astype(np.uint8 if bit_depth == 8 else np.uint16)


def write_bytes_atomic(path, payload: bytes) -> None:
    """Write ``payload`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_image(img: MultiPlaneImage | np.ndarray, path, clamp: bool = False, bit_depth: int = 8) -> None:
    """Write planes as an 8- or 16-bit PNG / PGM / PPM file.

    Raises :class:`RangeError` for samples outside ``[0, L]`` unless
    ``clamp`` is set.
    """
    if not isinstance(img, MultiPlaneImage):
        img = MultiPlaneImage.from_array(img)
    path = Path(path)
    suffix = _check_suffix(path)
    n = len(img)
    if n not in (1, 3):
        raise ShapeError(f"cannot save {n} planes")
    if suffix == ".pgm" and n != 1:
        raise ImageFormatError("PGM holds a single gray plane")
    if suffix == ".ppm" and n != 3:
        raise ImageFormatError("PPM holds three color planes")
    ints = [quantize(p, img.dynamic_range, bit_depth, clamp) for p in img.planes]
    data = ints[0] if n == 1 else np.stack(ints[::-1], axis=-1)  # RGB -> BGR
    ok, buf = cv2.imencode(suffix, data)
    if not ok:
        raise ImageFormatError(f"encoding {suffix} failed")
    try:
        write_bytes_atomic(path, buf.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def to_luminance(img: MultiPlaneImage | Sequence[np.ndarray]) -> np.ndarray:
    """Gray planes pass through; RGB uses Rec. 601 weights (0.299, 0.587, 0.114)."""
    planes = img.planes if isinstance(img, MultiPlaneImage) else tuple(img)
    if len(planes) == 1:
        return np.array(planes[0], dtype=np.float64, copy=True)
    if len(planes) == 3:
        r, g, b = planes
        return 0.299 * r + 0.587 * g + 0.114 * b
    raise ShapeError(f"luminance needs 1 or 3 planes, got {len(planes)}")
