"""Projection-form likelihood objectives and the 2-D MLE grid search.

Both front ends reduce to a matched-filter statistic: for a candidate
position the fully-digital objective is ``sum_t |s^H x_t|^2 / ||s||^2`` and
the DMA objective is ``sum_t |u^H y_t|^2 / ||u||^2`` with ``u = Q H s``.
These equal the projection forms ``sum_t ||P x_t||^2`` (rank-one
projectors); the dense projector products exist only as test oracles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dma import DmaWeights, apply_weights, combined_weights
from .exceptions import DegenerateCandidateError, EstimationFailureError
from .geometry import (ArrayLayout, PolarPosition, SPEED_OF_LIGHT, scan_geometry)
from .signal_model import SnapshotBatch, amplitude_coefficient, response_vector

EPS_STEERING_NORM = 1e-9


def steering_vector(layout: ArrayLayout, candidate: PolarPosition,
                    carrier_hz: float, gain_model: str = "unit") -> np.ndarray:
    """Candidate-position array response; equals the channel vector when the
    candidate coincides with the true source under the same gain model."""
    return response_vector(layout, candidate, carrier_hz, gain_model)


def effective_steering(s: np.ndarray, h: np.ndarray, w: DmaWeights) -> np.ndarray:
    """Q H s: the steering vector as seen at the DMA output ports."""
    return apply_weights(w, h, s)


def snapshot_covariance(batch: SnapshotBatch, average: bool = False) -> np.ndarray:
    """Sum (or mean, with ``average=True``) of the outer products y y^H."""
    y = batch.observations
    cov = y.T @ y.conj()
    return cov / batch.snapshot_count if average else cov


class FdObjective:
    """Fully-digital log-likelihood statistic over candidates."""

    def __init__(self, batch: SnapshotBatch, layout: ArrayLayout,
                 carrier_hz: float, gain_model: str = "unit", num_threads: int = 1):
        x = batch.observations
        if x.shape[1] != layout.n_elements:
            raise DegenerateCandidateError(
                f"batch dimension {x.shape[1]} does not match layout N={layout.n_elements}")
        self.batch = batch
        self.layout = layout
        self.carrier_hz = carrier_hz
        self.gain_model = gain_model
        self.num_threads = num_threads
        self._geom = scan_geometry(layout)
        self._wavenumber = 2.0 * np.pi * carrier_hz / SPEED_OF_LIGHT
        self._amp = amplitude_coefficient(gain_model, carrier_hz)
        # When T exceeds N it is cheaper to scan an eigenfactor of the
        # covariance than the raw snapshot matrix.
        t, n = x.shape
        if t <= n:
            self._factor = x
        else:
            evals, vecs = np.linalg.eigh(x.T @ x.conj())
            evals = np.clip(evals, 0.0, None)
            self._factor = (vecs * np.sqrt(evals)).T.conj()

    def __call__(self, candidate: PolarPosition) -> float:
        s = steering_vector(self.layout, candidate, self.carrier_hz, self.gain_model)
        proj = self.batch.observations @ s.conj()
        return float((proj.real**2 + proj.imag**2).sum() / np.vdot(s, s).real)

    def evaluate_grid(self, d_values, theta_values) -> np.ndarray:
        return kernels.scan_fd_objective(d_values, theta_values, self._geom,
                                         self._factor, self._wavenumber,
                                         self._amp, self.num_threads)


class DmaObjective:
    """DMA log-likelihood statistic under fixed weights ``w``."""

    def __init__(self, batch: SnapshotBatch, layout: ArrayLayout, h: np.ndarray,
                 w: DmaWeights, carrier_hz: float, gain_model: str = "unit",
                 eps_norm: float = EPS_STEERING_NORM, num_threads: int = 1):
        if batch.dim != w.n_strips:
            raise DegenerateCandidateError(
                f"batch dimension {batch.dim} does not match {w.n_strips} strips")
        self.batch = batch
        self.layout = layout
        self.h = np.asarray(h)
        self.w = w
        self.carrier_hz = carrier_hz
        self.gain_model = gain_model
        self.eps_norm = eps_norm
        self.num_threads = num_threads
        self._geom = scan_geometry(layout)
        self._wavenumber = 2.0 * np.pi * carrier_hz / SPEED_OF_LIGHT
        self._amp = amplitude_coefficient(gain_model, carrier_hz)
        self._wh = combined_weights(w, self.h)
        self._cov = snapshot_covariance(batch)

    def __call__(self, candidate: PolarPosition) -> float:
        s = steering_vector(self.layout, candidate, self.carrier_hz, self.gain_model)
        u = effective_steering(s, self.h, self.w)
        den = np.vdot(u, u).real
        if den < self.eps_norm**2:
            raise DegenerateCandidateError(
                f"effective steering norm below {self.eps_norm} at {candidate}")
        return float((u.conj() @ self._cov @ u).real / den)

    def evaluate_grid(self, d_values, theta_values) -> np.ndarray:
        return kernels.scan_dma_objective(
            d_values, theta_values, self._geom, self._wh, self._cov,
            self.layout.n_elements_per_strip, self._wavenumber, self._amp,
            self.eps_norm, self.num_threads)


def fd_objective(batch: SnapshotBatch, layout: ArrayLayout, candidate: PolarPosition,
                 carrier_hz: float, gain_model: str = "unit") -> float:
    """One-off fully-digital objective evaluation at ``candidate``."""
    return FdObjective(batch, layout, carrier_hz, gain_model)(candidate)


def dma_objective(batch: SnapshotBatch, layout: ArrayLayout, candidate: PolarPosition,
                  h: np.ndarray, w: DmaWeights, carrier_hz: float,
                  gain_model: str = "unit") -> float:
    """One-off DMA objective evaluation at ``candidate``."""
    return DmaObjective(batch, layout, h, w, carrier_hz, gain_model)(candidate)


@dataclass(frozen=True)
class SearchGrid:
    """Coarse grid plus coarse-to-fine refinement parameters."""

    d_values: np.ndarray
    theta_values: np.ndarray
    refine_stages: int = 3
    shrink_factor: float = 5.0
    refine_shape: tuple[int, int] = (31, 31)

    def __post_init__(self):
        d = np.ascontiguousarray(self.d_values, dtype=float)
        th = np.ascontiguousarray(self.theta_values, dtype=float)
        object.__setattr__(self, "d_values", d)
        object.__setattr__(self, "theta_values", th)
        if d.size == 0 or th.size == 0:
            raise ValueError("search grid must be non-empty")
        if np.any(d <= 0):
            raise ValueError("candidate distances must be positive")
        if d.size > 1 and np.any(np.diff(d) <= 0):
            raise ValueError("d_values must be strictly increasing")
        if th.size > 1 and np.any(np.diff(th) <= 0):
            raise ValueError("theta_values must be strictly increasing")
        if self.refine_stages < 0 or self.shrink_factor <= 1:
            raise ValueError("invalid refinement parameters")


def default_search_grid(d_max: float, d_min: float | None = None,
                        n_d: int = 60, n_theta: int = 121,
                        refine_stages: int = 3, shrink_factor: float = 5.0,
                        refine_shape: tuple[int, int] = (31, 31)) -> SearchGrid:
    """Log-spaced distances on [0.05, 1.2] * d_max (unless ``d_min`` is
    given) and uniform angles on the open front half-space (-pi/2, pi/2)."""
    lo = 0.05 * d_max if d_min is None else d_min
    d = np.geomspace(lo, 1.2 * d_max, n_d)
    th = np.linspace(-np.pi / 2, np.pi / 2, n_theta + 2)[1:-1]
    return SearchGrid(d, th, refine_stages, shrink_factor, refine_shape)


@dataclass(frozen=True)
class LikelihoodSurface:
    """Objective values over one grid stage with the stage argmax."""

    d_values: np.ndarray
    theta_values: np.ndarray
    values: np.ndarray  # (n_d, n_theta)
    argmax_indices: tuple[int, int]

    @property
    def argmax(self) -> PolarPosition:
        i, j = self.argmax_indices
        return PolarPosition(float(self.d_values[i]), float(self.theta_values[j]))

    @property
    def max_value(self) -> float:
        return float(self.values[self.argmax_indices])


@dataclass(frozen=True)
class GridSearchResult:
    estimate: PolarPosition
    max_value: float
    surfaces: list[LikelihoodSurface] = field(repr=False)
    n_evaluations: int = 0


def _evaluate(objective, d_values: np.ndarray, theta_values: np.ndarray) -> np.ndarray:
    if hasattr(objective, "evaluate_grid"):
        return np.asarray(objective.evaluate_grid(d_values, theta_values), dtype=float)
    values = np.empty((d_values.size, theta_values.size))
    for i, d in enumerate(d_values):
        for j, th in enumerate(theta_values):
            try:
                values[i, j] = objective(PolarPosition(float(d), float(th)))
            except DegenerateCandidateError:
                values[i, j] = -np.inf
    return values


def _refine_axis(center: float, span: float, n: int, lo: float, hi: float) -> np.ndarray:
    span = min(span, hi - lo)
    a = center - span / 2.0
    if a < lo:
        a = lo
    elif a + span > hi:
        a = hi - span
    return np.linspace(a, a + span, n)


def grid_search_mle(objective, grid: SearchGrid) -> GridSearchResult:
    """Maximise ``objective`` by coarse-to-fine grid search.

    Every stage evaluates the full stage grid, then re-centres a grid whose
    spans shrink by ``shrink_factor`` on the incumbent argmax.  Ties break
    toward the smallest distance, then the smallest angle, independent of
    evaluation order.
    """
    d_vals = grid.d_values
    th_vals = grid.theta_values
    d_lo, d_hi = float(d_vals[0]), float(d_vals[-1])
    th_lo, th_hi = float(th_vals[0]), float(th_vals[-1])
    d_span = d_hi - d_lo
    th_span = th_hi - th_lo
    surfaces: list[LikelihoodSurface] = []
    n_eval = 0
    for stage in range(grid.refine_stages + 1):
        values = _evaluate(objective, d_vals, th_vals)
        n_eval += values.size
        flat = int(np.argmax(values))  # first maximum: smallest d, then theta
        if not np.isfinite(values.flat[flat]):
            raise EstimationFailureError("all grid cells are degenerate")
        idx = (flat // th_vals.size, flat % th_vals.size)
        surfaces.append(LikelihoodSurface(d_vals, th_vals, values, idx))
        if stage == grid.refine_stages:
            break
        incumbent = surfaces[-1].argmax
        d_span /= grid.shrink_factor
        th_span /= grid.shrink_factor
        d_vals = _refine_axis(incumbent.d, d_span, grid.refine_shape[0], d_lo, d_hi)
        th_vals = _refine_axis(incumbent.theta, th_span, grid.refine_shape[1], th_lo, th_hi)
    final = surfaces[-1]
    return GridSearchResult(estimate=final.argmax, max_value=final.max_value,
                            surfaces=surfaces, n_evaluations=n_eval)


def save_surface_csv(surface: LikelihoodSurface, path):
    """Write rows (d_m, theta_rad, value) for external plotting."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["d_m", "theta_rad", "value"])
            for i, d in enumerate(surface.d_values):
                for j, th in enumerate(surface.theta_values):
                    writer.writerow([repr(float(d)), repr(float(th)),
                                     repr(float(surface.values[i, j]))])
    except OSError as exc:
        raise OSError(f"failed to write surface CSV {path}: {exc}") from exc
