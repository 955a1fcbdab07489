import numpy as np
import pytest

from epgif import _kernels_py

try:
    from epgif import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [pytest.param(_kernels_py.box_sum, id="numpy")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels.box_sum, id="cython"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=BACKENDS)
def box_sum_impl(request):
    return request.param


def naive_box_mean(img, r):
    """Truncated-window mean by explicit double loop."""
    h, w = img.shape
    out = np.empty((h, w))
    for y in range(h):
        for x in range(w):
            total, count = 0.0, 0
            for yy in range(max(0, y - r), min(h, y + r + 1)):
                for xx in range(max(0, x - r), min(w, x + r + 1)):
                    total += img[yy, xx]
                    count += 1
            out[y, x] = total / count
    return out


def naive_window_var(img, r):
    h, w = img.shape
    out = np.empty((h, w))
    for y in range(h):
        for x in range(w):
            patch = img[max(0, y - r):y + r + 1, max(0, x - r):x + r + 1]
            m = patch.mean()
            out[y, x] = np.mean((patch - m) ** 2)
    return out
