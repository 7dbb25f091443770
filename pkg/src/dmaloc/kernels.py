"""Kernel backend selection and typed wrappers for the grid scans.

The compiled Cython extension is preferred; the pure-NumPy implementation
is used when the extension is unavailable or when ``DMALOC_KERNEL=numpy``
is set.  Both backends produce the same values (up to floating-point
summation order) and are exercised against each other in the test suite.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("DMALOC_KERNEL", "").lower() == "numpy":
    from . import _scan_np as _impl
    BACKEND = "numpy"
else:
    try:
        from . import _scan as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _scan_np as _impl
        BACKEND = "numpy"


def backend_name() -> str:
    return BACKEND


def _as_f64(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.float64)


def scan_dma_objective(d_vals, th_vals, geom, w_flat, cov, n_per_group,
                       wavenumber, amp_coef, eps_norm, num_threads=1) -> np.ndarray:
    """Evaluate the DMA likelihood statistic over a (d, theta) grid.

    ``geom`` is the (ex, ey, r_sq) triple from ``geometry.scan_geometry``;
    ``w_flat`` the combined per-element weight q*h; ``cov`` the output
    sample covariance.  Returns an (n_d, n_theta) float array with -inf in
    degenerate cells.
    """
    ex, ey, er2 = geom
    w_flat = np.asarray(w_flat, dtype=np.complex128)
    return _impl.scan_dma(_as_f64(d_vals), _as_f64(th_vals),
                          _as_f64(ex), _as_f64(ey), _as_f64(er2),
                          _as_f64(w_flat.real), _as_f64(w_flat.imag),
                          np.ascontiguousarray(cov, dtype=np.complex128),
                          int(n_per_group), float(wavenumber), float(amp_coef),
                          float(eps_norm), int(num_threads))


def scan_fd_objective(d_vals, th_vals, geom, factor, wavenumber, amp_coef,
                      num_threads=1) -> np.ndarray:
    """Evaluate the fully-digital likelihood statistic over a grid.

    ``factor`` has shape (r, N); the statistic per cell is
    ``sum_r |factor_r . conj(s)|^2 / ||s||^2``.
    """
    ex, ey, er2 = geom
    factor = np.asarray(factor, dtype=np.complex128)
    return _impl.scan_fd(_as_f64(d_vals), _as_f64(th_vals),
                         _as_f64(ex), _as_f64(ey), _as_f64(er2),
                         _as_f64(factor.real), _as_f64(factor.imag),
                         float(wavenumber), float(amp_coef), int(num_threads))
