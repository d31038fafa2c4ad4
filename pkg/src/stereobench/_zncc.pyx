# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled zero-normalized cross-correlation kernels."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

DEF VAR_EPS = 1e-12


def zncc_map(cnp.float64_t[:, ::1] search, cnp.float64_t[:, ::1] template):
    """Correlation map of ``template`` over every placement inside ``search``.

    Returns an array of shape (H - th + 1, W - tw + 1) with values in
    [-1, 1]; placements where either patch has (near) zero variance score 0.
    """
    cdef Py_ssize_t sh = search.shape[0], sw = search.shape[1]
    cdef Py_ssize_t th = template.shape[0], tw = template.shape[1]
    if th > sh or tw > sw:
        raise ValueError("template larger than search region")

    cdef Py_ssize_t oh = sh - th + 1, ow = sw - tw + 1
    out_arr = np.empty((oh, ow), dtype=np.float64)
    cdef cnp.float64_t[:, ::1] out = out_arr

    cdef Py_ssize_t n = th * tw
    cdef double t_sum = 0.0, t_sq = 0.0
    cdef Py_ssize_t i, j, y, x
    cdef double v

    for i in range(th):
        for j in range(tw):
            v = template[i, j]
            t_sum += v
            t_sq += v * v
    cdef double t_mean = t_sum / n
    cdef double t_var = t_sq - t_sum * t_mean
    cdef double t_norm = sqrt(t_var) if t_var > VAR_EPS else 0.0

    cdef double w_sum, w_sq, cross, w_var, denom
    for y in range(oh):
        for x in range(ow):
            w_sum = 0.0
            w_sq = 0.0
            cross = 0.0
            for i in range(th):
                for j in range(tw):
                    v = search[y + i, x + j]
                    w_sum += v
                    w_sq += v * v
                    cross += v * (template[i, j] - t_mean)
            w_var = w_sq - w_sum * w_sum / n
            denom = t_norm * sqrt(w_var) if w_var > VAR_EPS else 0.0
            out[y, x] = cross / denom if denom > 0.0 else 0.0
    return out_arr


def zncc_score(cnp.float64_t[:, ::1] a, cnp.float64_t[:, ::1] b):
    """Scalar zero-normalized cross-correlation of two equal-shape patches."""
    cdef Py_ssize_t h = a.shape[0], w = a.shape[1]
    if b.shape[0] != h or b.shape[1] != w:
        raise ValueError("patches must have identical shape")
    cdef Py_ssize_t n = h * w
    cdef double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0
    cdef Py_ssize_t i, j
    cdef double va, vb
    for i in range(h):
        for j in range(w):
            va = a[i, j]
            vb = b[i, j]
            sa += va
            sb += vb
            saa += va * va
            sbb += vb * vb
            sab += va * vb
    cdef double var_a = saa - sa * sa / n
    cdef double var_b = sbb - sb * sb / n
    if var_a <= VAR_EPS or var_b <= VAR_EPS:
        return 0.0
    return (sab - sa * sb / n) / sqrt(var_a * var_b)
