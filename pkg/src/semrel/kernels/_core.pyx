# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Same contracts as semrel.kernels._pure: an unnormalized radix-2 FFT over
power-of-two grids, separable Gaussian correlation with replicate edges,
and pixel-center bilinear resampling.  The test suite asserts parity
between the two lanes.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, floor, M_PI

cnp.import_array()


cdef void _fft_rows_inplace(double complex[:, ::1] a, double sign):
    """In-place iterative Cooley-Tukey along the last axis of each row.

    Twiddle factors and the bit-reversal permutation depend only on the
    row length, so both are tabulated once and shared by every row.
    """
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    if n == 1:
        return
    cdef Py_ssize_t bits = 0
    while (<Py_ssize_t> 1 << bits) < n:
        bits += 1

    rev_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] rev = rev_arr
    cdef Py_ssize_t i, j, b, rj, span, m, k, base
    for j in range(n):
        rj = 0
        for b in range(bits):
            rj |= ((j >> b) & 1) << (bits - 1 - b)
        rev[j] = rj

    # slot span + k holds the stage-"span" twiddle for offset k (slot 0 unused)
    tw_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] tw = tw_arr
    cdef double ang
    span = 1
    while span < n:
        for k in range(span):
            ang = sign * M_PI * k / span
            tw[span + k] = cos(ang) + 1j * sin(ang)
        span *= 2

    cdef double complex u, t, w
    for i in range(rows):
        for j in range(n):
            rj = rev[j]
            if j < rj:
                u = a[i, j]
                a[i, j] = a[i, rj]
                a[i, rj] = u
        span = 1
        while span < n:
            m = 2 * span
            for base in range(0, n, m):
                for k in range(span):
                    w = tw[span + k]
                    u = a[i, base + k]
                    t = w * a[i, base + k + span]
                    a[i, base + k] = u + t
                    a[i, base + k + span] = u - t
            span = m


def fft2(data, bint inverse=False):
    """Unnormalized forward 2-D DFT; inverse applies 1/(W*H) scaling.

    Both dimensions must be powers of two (enforced by the caller).
    """
    a = np.array(data, dtype=np.complex128, order="C")
    cdef double sign = 1.0 if inverse else -1.0
    _fft_rows_inplace(a, sign)
    at = np.ascontiguousarray(a.T)
    _fft_rows_inplace(at, sign)
    a = np.ascontiguousarray(at.T)
    if inverse:
        a = a / (a.shape[0] * a.shape[1])
    return a


def gaussian_blur_replicate(img, kernel):
    """Separable correlation with a symmetric 1-D kernel, replicate-edge padding.

    Horizontal pass first, then vertical, accumulating kernel taps in
    ascending order exactly like the fallback lane.
    """
    cdef double[:, ::1] a = np.ascontiguousarray(img, dtype=np.float64)
    cdef double[::1] k = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t h = a.shape[0], w = a.shape[1]
    cdef Py_ssize_t taps = k.shape[0]
    cdef Py_ssize_t r = (taps - 1) // 2
    tmp_arr = np.zeros((h, w), dtype=np.float64)
    out_arr = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] tmp = tmp_arr
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t, src
    cdef double acc
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for t in range(taps):
                src = j + t - r
                if src < 0:
                    src = 0
                elif src >= w:
                    src = w - 1
                acc += k[t] * a[i, src]
            tmp[i, j] = acc
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for t in range(taps):
                src = i + t - r
                if src < 0:
                    src = 0
                elif src >= h:
                    src = h - 1
                acc += k[t] * tmp[src, j]
            out[i, j] = acc
    return out_arr


def resize_bilinear(img, Py_ssize_t out_h, Py_ssize_t out_w):
    """Bilinear resample with pixel-center alignment (see the fallback lane)."""
    cdef double[:, ::1] a = np.ascontiguousarray(img, dtype=np.float64)
    cdef Py_ssize_t in_h = a.shape[0], in_w = a.shape[1]
    if out_h == in_h and out_w == in_w:
        return np.array(a, dtype=np.float64, copy=True)
    out_arr = np.zeros((out_h, out_w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, y0, x0, y1, x1
    cdef double sy, sx, wy, wx, top, bot
    for i in range(out_h):
        sy = (i + 0.5) * (<double> in_h / <double> out_h) - 0.5
        if sy < 0.0:
            sy = 0.0
        elif sy > in_h - 1.0:
            sy = in_h - 1.0
        y0 = <Py_ssize_t> floor(sy)
        y1 = y0 + 1 if y0 + 1 < in_h else in_h - 1
        wy = sy - y0
        for j in range(out_w):
            sx = (j + 0.5) * (<double> in_w / <double> out_w) - 0.5
            if sx < 0.0:
                sx = 0.0
            elif sx > in_w - 1.0:
                sx = in_w - 1.0
            x0 = <Py_ssize_t> floor(sx)
            x1 = x0 + 1 if x0 + 1 < in_w else in_w - 1
            wx = sx - x0
            top = a[y0, x0] * (1.0 - wx) + a[y0, x1] * wx
            bot = a[y1, x0] * (1.0 - wx) + a[y1, x1] * wx
            out[i, j] = top * (1.0 - wy) + bot * wy
    return out_arr
