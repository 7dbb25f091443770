"""Array geometry and spherical-wavefront distance/phase computations.

The receive array is a stack of parallel one-dimensional microstrips: strip
``i`` carries ``n_elements_per_strip`` radiating elements along the Z axis,
strips are stacked along Y, and the aperture lies in the X = 0 plane.  The
source lives in the X-Y plane and is addressed in polar coordinates
``(d, theta)`` relative to the array reference point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def wavelength(carrier_hz: float) -> float:
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    return SPEED_OF_LIGHT / carrier_hz


@dataclass(frozen=True)
class PolarPosition:
    """Source position: range ``d`` in meters, angle ``theta`` in radians.

    ``theta`` is measured in the X-Y plane from the X axis (aperture
    broadside); valid range is [-pi, pi).
    """

    d: float
    theta: float

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"range must be positive, got {self.d}")
        if not (-np.pi <= self.theta < np.pi):
            raise ValueError(f"theta must lie in [-pi, pi), got {self.theta}")

    def to_xy(self) -> tuple[float, float]:
        return self.d * np.cos(self.theta), self.d * np.sin(self.theta)

    @classmethod
    def from_xy(cls, x: float, y: float) -> "PolarPosition":
        return cls(float(np.hypot(x, y)), float(np.arctan2(y, x)))


def cartesian_error_m(a: PolarPosition, b: PolarPosition) -> float:
    """Euclidean distance in meters between two polar positions."""
    ax, ay = a.to_xy()
    bx, by = b.to_xy()
    return float(np.hypot(ax - bx, ay - by))


@dataclass(frozen=True)
class ArrayLayout:
    """Physical array description.

    Element ``(i, l)`` (strip ``i``, element ``l``, both 0-based) sits at
    ``element_positions[i * n_elements_per_strip + l]`` and is at waveguide
    distance ``feed_distances_m[i, l]`` from its strip's output port.
    """

    n_microstrips: int
    n_elements_per_strip: int
    element_positions: np.ndarray  # (N, 3) meters
    element_spacing_m: float
    strip_pitch_m: float
    feed_distances_m: np.ndarray  # (N_d, N_e) meters
    reference_point: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "element_positions",
                           np.ascontiguousarray(self.element_positions, dtype=float))
        object.__setattr__(self, "feed_distances_m",
                           np.ascontiguousarray(self.feed_distances_m, dtype=float))
        object.__setattr__(self, "reference_point",
                           np.ascontiguousarray(self.reference_point, dtype=float))
        if self.n_microstrips < 1 or self.n_elements_per_strip < 1:
            raise ValueError("strip and element counts must be positive")
        n = self.n_microstrips * self.n_elements_per_strip
        if self.element_positions.shape != (n, 3):
            raise ValueError(f"element_positions must have shape ({n}, 3)")
        if self.feed_distances_m.shape != (self.n_microstrips, self.n_elements_per_strip):
            raise ValueError("feed_distances_m must have shape (n_strips, n_elements)")
        if np.any(self.feed_distances_m < 0):
            raise ValueError("feed distances must be non-negative")
        if self.n_elements_per_strip > 1 and not np.all(np.diff(self.feed_distances_m, axis=1) > 0):
            raise ValueError("feed distances must increase strictly along each strip")
        self._check_strip_geometry()

    def _check_strip_geometry(self):
        """Elements of a strip must be collinear and strips parallel."""
        if self.n_elements_per_strip < 2:
            return
        pos = self.element_positions.reshape(self.n_microstrips, self.n_elements_per_strip, 3)
        deltas = np.diff(pos, axis=1)
        scale = max(float(np.max(np.linalg.norm(deltas, axis=2))), 1e-300)
        first = deltas[:, :1, :]
        if np.max(np.linalg.norm(np.cross(deltas, first), axis=2)) > 1e-9 * scale**2:
            raise ValueError("elements within a strip must be collinear")
        if self.n_microstrips > 1:
            axes = first[:, 0, :]
            if np.max(np.linalg.norm(np.cross(axes, axes[:1]), axis=1)) > 1e-9 * scale**2:
                raise ValueError("strips must be parallel")

    @property
    def n_elements(self) -> int:
        return self.n_microstrips * self.n_elements_per_strip

    def flat_index(self, i: int, l: int) -> int:
        if not (0 <= i < self.n_microstrips and 0 <= l < self.n_elements_per_strip):
            raise IndexError(f"element index ({i}, {l}) out of range")
        return i * self.n_elements_per_strip + l

    def relative_positions(self) -> np.ndarray:
        """Element positions relative to the reference point, shape (N, 3)."""
        return self.element_positions - self.reference_point

    def aperture_diameter_m(self) -> float:
        """Largest pairwise element distance (aperture diagonal)."""
        if self.n_elements < 2:
            return 0.0
        p = self.element_positions
        diff = p[:, None, :] - p[None, :, :]
        return float(np.sqrt((diff**2).sum(-1).max()))


def uniform_layout(n_microstrips: int, n_elements_per_strip: int,
                   element_spacing_m: float, strip_pitch_m: float,
                   feed_distances_m: np.ndarray | None = None) -> ArrayLayout:
    """Default layout generator: strips along Z, stacked along Y, centroid at
    the origin, aperture plane X = 0.

    Feed distances default to ``(l + 1) * spacing`` with the output port at
    the strip end nearest element l = 0.
    """
    nd, ne = n_microstrips, n_elements_per_strip
    z = (np.arange(ne) - (ne - 1) / 2.0) * element_spacing_m
    y = (np.arange(nd) - (nd - 1) / 2.0) * strip_pitch_m
    pos = np.zeros((nd * ne, 3))
    pos[:, 1] = np.repeat(y, ne)
    pos[:, 2] = np.tile(z, nd)
    if feed_distances_m is None:
        feed_distances_m = np.tile((np.arange(ne) + 1.0) * element_spacing_m, (nd, 1))
    return ArrayLayout(nd, ne, pos, element_spacing_m, strip_pitch_m,
                       np.asarray(feed_distances_m, dtype=float))


def source_xyz(layout: ArrayLayout, src: PolarPosition) -> np.ndarray:
    """3-D source position: polar coordinates are relative to the reference."""
    x, y = src.to_xy()
    return layout.reference_point + np.array([x, y, 0.0])


def source_distances(layout: ArrayLayout, src: PolarPosition) -> np.ndarray:
    """Distances from every element to the source, shape (N,).

    Uses the law-of-cosines form
    ``sqrt(r^2 + d^2 - 2 r d cos(gamma))`` with ``r`` the element distance
    from the reference point and ``gamma`` the angle between element and
    source directions; identical to the 3-D Euclidean distance.
    """
    rel = layout.relative_positions()
    r2 = (rel**2).sum(1)
    ux, uy = np.cos(src.theta), np.sin(src.theta)
    proj = rel[:, 0] * ux + rel[:, 1] * uy  # r * cos(gamma)
    return np.sqrt(r2 + src.d**2 - 2.0 * src.d * proj)


def element_source_distance(layout: ArrayLayout, i: int, l: int, src: PolarPosition) -> float:
    """Distance from element ``(i, l)`` to the source in meters."""
    n = layout.flat_index(i, l)
    rel = layout.element_positions[n] - layout.reference_point
    r2 = float(rel @ rel)
    proj = rel[0] * np.cos(src.theta) + rel[1] * np.sin(src.theta)
    return float(np.sqrt(r2 + src.d**2 - 2.0 * src.d * proj))


def phase_delay(distance_m, carrier_hz: float):
    """Propagation phase 2*pi*f*d/c in radians (not reduced mod 2*pi)."""
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    distance_m = np.asarray(distance_m, dtype=float)
    if np.any(distance_m < 0):
        raise ValueError("distance must be non-negative")
    out = 2.0 * np.pi * carrier_hz * distance_m / SPEED_OF_LIGHT
    return float(out) if out.ndim == 0 else out


def fraunhofer_distance(layout: ArrayLayout, carrier_hz: float) -> float:
    """Far-field boundary 2*D^2/lambda with D the aperture diagonal."""
    d = layout.aperture_diameter_m()
    return 2.0 * d * d / wavelength(carrier_hz)


def scan_geometry(layout: ArrayLayout) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-element (x, y, r^2) relative to the reference point, as the
    contiguous float64 arrays consumed by the grid-scan kernels."""
    rel = layout.relative_positions()
    return (np.ascontiguousarray(rel[:, 0]), np.ascontiguousarray(rel[:, 1]),
            np.ascontiguousarray((rel**2).sum(1)))
