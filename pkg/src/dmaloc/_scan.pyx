# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid-scan kernels.

Fused evaluation of the candidate steering field and likelihood statistic
per grid cell; each cell is independent, so the parallel loop is
deterministic regardless of thread count.  Mirrors ``_scan_np``.
"""

import numpy as np

from cython.parallel cimport parallel, prange
from libc.math cimport INFINITY, cos, sin, sqrt
from libc.stdlib cimport free, malloc

cdef double DIST_FLOOR_SQ = 1e-30


def scan_dma(double[::1] d_vals, double[::1] th_vals,
             double[::1] ex, double[::1] ey, double[::1] er2,
             double[::1] w_re, double[::1] w_im,
             double complex[:, ::1] cov, int n_per_group,
             double wavenumber, double amp_coef, double eps_norm,
             int num_threads=1):
    cdef Py_ssize_t nd = d_vals.shape[0]
    cdef Py_ssize_t nt = th_vals.shape[0]
    cdef Py_ssize_t n = ex.shape[0]
    cdef Py_ssize_t n_groups = n // n_per_group
    cdef Py_ssize_t npg = n_per_group
    cdef Py_ssize_t ncells = nd * nt

    out_arr = np.empty((nd, nt))
    cdef double[:, ::1] out = out_arr
    cth_arr = np.cos(np.asarray(th_vals))
    sth_arr = np.sin(np.asarray(th_vals))
    cdef double[::1] cth = cth_arr
    cdef double[::1] sth = sth_arr
    cov_re_arr = np.ascontiguousarray(np.asarray(cov).real)
    cov_im_arr = np.ascontiguousarray(np.asarray(cov).imag)
    cdef double[:, ::1] cov_re = cov_re_arr
    cdef double[:, ::1] cov_im = cov_im_arr

    cdef double eps_sq = eps_norm * eps_norm
    cdef Py_ssize_t c, row, col, g, l, idx, a, b
    cdef double d, ct, st, d2, twod, dist_sq, dist, ph, amp, cp, sp
    cdef double acc_re, acc_im, den, num, tr, ti
    cdef double *ur
    cdef double *ui

    with nogil, parallel(num_threads=num_threads):
        ur = <double *> malloc(n_groups * sizeof(double))
        ui = <double *> malloc(n_groups * sizeof(double))
        for c in prange(ncells, schedule="static"):
            row = c // nt
            col = c - row * nt
            d = d_vals[row]
            ct = cth[col]
            st = sth[col]
            d2 = d * d
            twod = 2.0 * d
            for g in range(n_groups):
                acc_re = 0.0
                acc_im = 0.0
                for l in range(npg):
                    idx = g * npg + l
                    dist_sq = er2[idx] + d2 - twod * (ex[idx] * ct + ey[idx] * st)
                    if dist_sq < DIST_FLOOR_SQ:
                        dist_sq = DIST_FLOOR_SQ
                    dist = sqrt(dist_sq)
                    ph = wavenumber * dist
                    cp = cos(ph)
                    sp = sin(ph)
                    if amp_coef != 0.0:
                        amp = amp_coef / dist
                        cp = cp * amp
                        sp = sp * amp
                    # w * s with s = amp * (cos - j sin)
                    acc_re = acc_re + w_re[idx] * cp + w_im[idx] * sp
                    acc_im = acc_im + w_im[idx] * cp - w_re[idx] * sp
                ur[g] = acc_re
                ui[g] = acc_im
            den = 0.0
            for g in range(n_groups):
                den = den + ur[g] * ur[g] + ui[g] * ui[g]
            if den < eps_sq:
                out[row, col] = -INFINITY
            else:
                num = 0.0
                for a in range(n_groups):
                    tr = 0.0
                    ti = 0.0
                    for b in range(n_groups):
                        tr = tr + cov_re[a, b] * ur[b] - cov_im[a, b] * ui[b]
                        ti = ti + cov_re[a, b] * ui[b] + cov_im[a, b] * ur[b]
                    num = num + ur[a] * tr + ui[a] * ti
                out[row, col] = num / den
        free(ur)
        free(ui)
    return out_arr


def scan_fd(double[::1] d_vals, double[::1] th_vals,
            double[::1] ex, double[::1] ey, double[::1] er2,
            double[:, ::1] f_re, double[:, ::1] f_im,
            double wavenumber, double amp_coef, int num_threads=1):
    cdef Py_ssize_t nd = d_vals.shape[0]
    cdef Py_ssize_t nt = th_vals.shape[0]
    cdef Py_ssize_t n = ex.shape[0]
    cdef Py_ssize_t nrows = f_re.shape[0]
    cdef Py_ssize_t ncells = nd * nt

    out_arr = np.empty((nd, nt))
    cdef double[:, ::1] out = out_arr
    cth_arr = np.cos(np.asarray(th_vals))
    sth_arr = np.sin(np.asarray(th_vals))
    cdef double[::1] cth = cth_arr
    cdef double[::1] sth = sth_arr

    cdef Py_ssize_t c, row, col, idx, r
    cdef double d, ct, st, d2, twod, dist_sq, dist, ph, amp, cp, sp
    cdef double den, num, vr, vi
    cdef double *sr  # conj(steering) real part
    cdef double *si  # conj(steering) imag part

    with nogil, parallel(num_threads=num_threads):
        sr = <double *> malloc(n * sizeof(double))
        si = <double *> malloc(n * sizeof(double))
        for c in prange(ncells, schedule="static"):
            row = c // nt
            col = c - row * nt
            d = d_vals[row]
            ct = cth[col]
            st = sth[col]
            d2 = d * d
            twod = 2.0 * d
            den = 0.0
            for idx in range(n):
                dist_sq = er2[idx] + d2 - twod * (ex[idx] * ct + ey[idx] * st)
                if dist_sq < DIST_FLOOR_SQ:
                    dist_sq = DIST_FLOOR_SQ
                dist = sqrt(dist_sq)
                ph = wavenumber * dist
                cp = cos(ph)
                sp = sin(ph)
                if amp_coef != 0.0:
                    amp = amp_coef / dist
                    cp = cp * amp
                    sp = sp * amp
                sr[idx] = cp
                si[idx] = sp
                den = den + cp * cp + sp * sp
            num = 0.0
            for r in range(nrows):
                vr = 0.0
                vi = 0.0
                for idx in range(n):
                    vr = vr + f_re[r, idx] * sr[idx] - f_im[r, idx] * si[idx]
                    vi = vi + f_re[r, idx] * si[idx] + f_im[r, idx] * sr[idx]
                num = num + vr * vr + vi * vi
            out[row, col] = num / den
        free(sr)
        free(si)
    return out_arr
