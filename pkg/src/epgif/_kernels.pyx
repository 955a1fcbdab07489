# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled box kernel.

Same block prefix/suffix scheme as :mod:`epgif._kernels_py`: each window
sum adds only samples inside the window, and the cost is independent of
the radius. Returns sums, not means.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _padded_len(Py_ssize_t n, Py_ssize_t r) nogil:
    cdef Py_ssize_t k = 2 * r + 1
    return ((n + 2 * r + k - 1) // k + 1) * k


def box_sum(img, Py_ssize_t radius):
    """Sum of ``img`` over the (2r+1)x(2r+1) window clipped to the image."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    cdef const double[:, ::1] src = np.ascontiguousarray(img, dtype=np.float64)
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    out_arr = np.zeros((h, w), dtype=np.float64)
    if h == 0 or w == 0:
        return out_arr
    cdef double[:, ::1] out = out_arr

    cdef Py_ssize_t ry = min(radius, h - 1), rx = min(radius, w - 1)
    cdef Py_ssize_t ky = 2 * ry + 1, kx = 2 * rx + 1
    cdef Py_ssize_t my = _padded_len(h, ry), mx = _padded_len(w, rx)
    cdef double[:, ::1] pre = np.zeros((my, w), dtype=np.float64)
    cdef double[:, ::1] suf = np.zeros((my, w), dtype=np.float64)
    cdef double[:, ::1] tmp = np.empty((h, w), dtype=np.float64)
    cdef double[::1] pre1 = np.zeros(mx, dtype=np.float64)
    cdef double[::1] suf1 = np.zeros(mx, dtype=np.float64)
    cdef double[::1] row = np.zeros(mx, dtype=np.float64)
    cdef Py_ssize_t i, j, t, s

    with nogil:
        # vertical pass over padded row index t (sample row t - ry)
        for t in range(my):
            s = t - ry
            if t % ky == 0:
                for j in range(w):
                    pre[t, j] = src[s, j] if 0 <= s < h else 0.0
            else:
                for j in range(w):
                    pre[t, j] = pre[t - 1, j] + (src[s, j] if 0 <= s < h else 0.0)
        for t in range(my - 1, -1, -1):
            s = t - ry
            if t % ky == ky - 1:
                for j in range(w):
                    suf[t, j] = src[s, j] if 0 <= s < h else 0.0
            else:
                for j in range(w):
                    suf[t, j] = suf[t + 1, j] + (src[s, j] if 0 <= s < h else 0.0)
        for i in range(h):
            if i % ky == 0:
                for j in range(w):
                    tmp[i, j] = pre[i + ky - 1, j]
            else:
                for j in range(w):
                    tmp[i, j] = suf[i, j] + pre[i + ky - 1, j]

        # horizontal pass, one row at a time
        for i in range(h):
            for t in range(mx):
                s = t - rx
                row[t] = tmp[i, s] if 0 <= s < w else 0.0
            for t in range(mx):
                if t % kx == 0:
                    pre1[t] = row[t]
                else:
                    pre1[t] = pre1[t - 1] + row[t]
            for t in range(mx - 1, -1, -1):
                if t % kx == kx - 1:
                    suf1[t] = row[t]
                else:
                    suf1[t] = suf1[t + 1] + row[t]
            for j in range(w):
                if j % kx == 0:
                    out[i, j] = pre1[j + kx - 1]
                else:
                    out[i, j] = suf1[j] + pre1[j + kx - 1]
    return out_arr
