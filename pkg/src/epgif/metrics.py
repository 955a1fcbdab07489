"""Full-reference quality metrics and the CSV report format."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import convolve2d

from .errors import ShapeError
from .image import as_plane, check_same_shape, write_bytes_atomic

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
CSV_HEADER = ("method", "zeta", "lambda", "psnr_db", "ssim")


def psnr(a, b, L: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``math.inf`` for identical planes."""
    a, b = as_plane(a, "a"), as_plane(b, "b")
    check_same_shape(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(L * L / mse)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    ax = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(ax * ax) / (2.0 * sigma * sigma))
    win = np.outer(g, g)
    return win / win.sum()


def ssim_map(a, b, L: float = 1.0) -> np.ndarray:
    """Local SSIM over every full 11x11 Gaussian window (no border padding)."""
    a, b = as_plane(a, "a"), as_plane(b, "b")
    check_same_shape(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ShapeError(f"SSIM needs both dimensions >= {SSIM_WINDOW}, got {a.shape}")
    win = gaussian_window()
    c1 = (SSIM_K1 * L) ** 2
    c2 = (SSIM_K2 * L) ** 2

    def filt(x):
        return convolve2d(x, win, mode="valid")

    mu_a, mu_b = filt(a), filt(b)
    # identical operation order for the three second moments keeps ssim(a, a) == 1
    var_a = filt(a * a) - mu_a * mu_a
    var_b = filt(b * b) - mu_b * mu_b
    cov = filt(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b, L: float = 1.0) -> float:
    """Mean structural similarity (Gaussian window 11x11, sigma 1.5, K1=0.01, K2=0.03)."""
    return float(np.mean(ssim_map(a, b, L)))


@dataclass(frozen=True)
class MetricRow:
    method: str
    zeta: int
    lam: float
    psnr: float
    ssim: float


@dataclass
class MetricReport:
    rows: list = field(default_factory=list)

    def add(self, method: str, zeta: int, lam: float, psnr_db: float, ssim_value: float) -> None:
        self.rows.append(MetricRow(method, int(zeta), float(lam), float(psnr_db), float(ssim_value)))

    def sorted_rows(self) -> list:
        return sorted(self.rows, key=lambda r: (r.method, r.zeta, r.lam))


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.4f}"


def report_csv(report: MetricReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.sorted_rows():
        writer.writerow([row.method, row.zeta, _fmt(row.lam), _fmt(row.psnr), _fmt(row.ssim)])
    return buf.getvalue()


def emit_report(report: MetricReport, path) -> None:
    """Write the report as CSV, rows ordered by (method, zeta, lambda)."""
    write_bytes_atomic(path, report_csv(report).encode())
