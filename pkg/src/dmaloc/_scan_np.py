"""Pure-NumPy grid-scan kernels (fallback backend).

Same call signatures as the compiled ``_scan`` extension: the effective
steering field and the likelihood statistic are evaluated for every
candidate ``(d, theta)`` grid cell.  Work is blocked one distance row at a
time so peak memory stays at ``n_theta x n_elements`` complex entries.
"""

from __future__ import annotations

import numpy as np

_DIST_FLOOR_SQ = 1e-30


def _steering_row(d, cos_th, sin_th, ex, ey, er2, wavenumber, amp_coef):
    """Steering vectors for one distance and all angles, shape (nt, N)."""
    proj = np.outer(cos_th, ex) + np.outer(sin_th, ey)
    dist_sq = er2[None, :] + d * d - 2.0 * d * proj
    np.maximum(dist_sq, _DIST_FLOOR_SQ, out=dist_sq)
    dist = np.sqrt(dist_sq)
    s = np.exp(-1j * wavenumber * dist)
    if amp_coef != 0.0:
        s *= amp_coef / dist
    return s


def scan_dma(d_vals, th_vals, ex, ey, er2, w_re, w_im, cov, n_per_group,
             wavenumber, amp_coef, eps_norm, num_threads=1):
    """DMA likelihood statistic u^H R u / ||u||^2 over the grid.

    ``w`` is the per-element combined weight (DMA coefficient times
    waveguide response); ``cov`` the n_strips x n_strips output sample
    covariance.  Cells with ||u|| below ``eps_norm`` are set to -inf.
    """
    d_vals = np.asarray(d_vals, dtype=float)
    th_vals = np.asarray(th_vals, dtype=float)
    w = np.asarray(w_re) + 1j * np.asarray(w_im)
    cov = np.asarray(cov, dtype=complex)
    n = w.shape[0]
    n_groups = n // int(n_per_group)
    cos_th, sin_th = np.cos(th_vals), np.sin(th_vals)
    out = np.empty((d_vals.shape[0], th_vals.shape[0]))
    eps_sq = eps_norm * eps_norm
    for row, d in enumerate(d_vals):
        s = _steering_row(d, cos_th, sin_th, ex, ey, er2, wavenumber, amp_coef)
        u = (w[None, :] * s).reshape(-1, n_groups, int(n_per_group)).sum(axis=2)
        den = (u.real**2 + u.imag**2).sum(axis=1)
        num = np.einsum("ca,ab,cb->c", u.conj(), cov, u).real
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = num / den
        out[row] = np.where(den < eps_sq, -np.inf, vals)
    return out


def scan_fd(d_vals, th_vals, ex, ey, er2, f_re, f_im, wavenumber, amp_coef,
            num_threads=1):
    """Fully-digital statistic sum_r |F_r . conj(s)|^2 / ||s||^2 over the grid.

    Rows of ``F`` are the observation snapshots (or any factor whose Gram
    matrix is the sample covariance).
    """
    d_vals = np.asarray(d_vals, dtype=float)
    th_vals = np.asarray(th_vals, dtype=float)
    factor = np.asarray(f_re) + 1j * np.asarray(f_im)
    cos_th, sin_th = np.cos(th_vals), np.sin(th_vals)
    out = np.empty((d_vals.shape[0], th_vals.shape[0]))
    for row, d in enumerate(d_vals):
        s = _steering_row(d, cos_th, sin_th, ex, ey, er2, wavenumber, amp_coef)
        den = (s.real**2 + s.imag**2).sum(axis=1)
        v = s.conj() @ factor.T  # (nt, r): v[t, r] = sum_n F[r, n] * conj(s_n)
        num = (v.real**2 + v.imag**2).sum(axis=1)
        out[row] = num / den
    return out
