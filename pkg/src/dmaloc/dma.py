"""Metasurface weight matrix: constraint regimes, tuning, and application.

Weights are stored as phases so that switching between the Lorentzian
constraint set ``q = (j + e^{j phi}) / 2`` and its phase-only relaxation
``q = e^{j phi}`` is exact.  The weight matrix row for strip ``i`` is
nonzero only on that strip's element block, so it is applied as a grouped
sum and never materialised densely outside of test oracles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .geometry import ArrayLayout, PolarPosition, phase_delay, source_distances
from .seeding import SeedLike
from .signal_model import WaveguideModel

LORENTZIAN = "lorentzian"
PHASE_ONLY = "phase_only"
REGIMES = (LORENTZIAN, PHASE_ONLY)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class DmaWeights:
    """Per-element phases plus the constraint regime they materialise under."""

    phases: np.ndarray  # (N_d, N_e), wrapped to [0, 2*pi)
    regime: str

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ConfigurationError(f"unknown weight regime {self.regime!r}")
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim != 2:
            raise ConfigurationError("phases must be a (n_strips, n_elements) array")
        object.__setattr__(self, "phases", np.ascontiguousarray(np.mod(phases, TWO_PI)))

    @property
    def n_strips(self) -> int:
        return self.phases.shape[0]

    @property
    def n_elements_per_strip(self) -> int:
        return self.phases.shape[1]

    @property
    def values(self) -> np.ndarray:
        """Materialised complex weights, shape (N_d, N_e)."""
        phasor = np.exp(1j * self.phases)
        if self.regime == LORENTZIAN:
            return (1j + phasor) / 2.0
        return phasor

    def flat_values(self) -> np.ndarray:
        return self.values.reshape(-1)

    def dense_matrix(self) -> np.ndarray:
        """Dense (N_d, N) weight matrix; test/inspection use only."""
        nd, ne = self.phases.shape
        q = np.zeros((nd, nd * ne), dtype=complex)
        vals = self.values
        for i in range(nd):
            q[i, i * ne:(i + 1) * ne] = vals[i]
        return q


def _check_match(w: DmaWeights, layout: ArrayLayout):
    if (w.n_strips, w.n_elements_per_strip) != (layout.n_microstrips, layout.n_elements_per_strip):
        raise ConfigurationError(
            f"weights shape {w.phases.shape} does not match layout "
            f"({layout.n_microstrips}, {layout.n_elements_per_strip})")


def random_weights(layout: ArrayLayout, regime: str = LORENTZIAN,
                   seed: SeedLike | None = None) -> DmaWeights:
    """Phases i.i.d. uniform on [0, 2*pi); deterministic given ``seed``."""
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, TWO_PI, size=(layout.n_microstrips, layout.n_elements_per_strip))
    return DmaWeights(phases=phases, regime=regime)


def tune_weights(layout: ArrayLayout, waveguide: WaveguideModel,
                 focus: PolarPosition, carrier_hz: float) -> DmaWeights:
    """Closed-form phase-only weights that focus the array on ``focus``.

    Each element's phase cancels the propagation phase to the focus point
    plus the phase accumulated inside its waveguide:
    ``psi = v(focus) + rho * beta`` (mod 2*pi).
    """
    v = phase_delay(source_distances(layout, focus), carrier_hz)
    v = v.reshape(layout.n_microstrips, layout.n_elements_per_strip)
    _, beta = waveguide.per_strip(layout.n_microstrips)
    phases = v + layout.feed_distances_m * beta[:, None]
    return DmaWeights(phases=phases, regime=PHASE_ONLY)


def project_lorentzian(w: DmaWeights) -> DmaWeights:
    """Carry the phase field over to the Lorentzian set: q = (j + e^{j psi})/2."""
    if w.regime != PHASE_ONLY:
        raise ConfigurationError("projection expects phase-only weights")
    return DmaWeights(phases=w.phases.copy(), regime=LORENTZIAN)


def combined_weights(w: DmaWeights, h: np.ndarray) -> np.ndarray:
    """Per-element product q_il * h_il as a flat (N,) vector."""
    h = np.asarray(h)
    if h.shape != (w.n_strips * w.n_elements_per_strip,):
        raise ConfigurationError(
            f"waveguide diagonal has length {h.shape}, expected {w.n_strips * w.n_elements_per_strip}")
    return w.flat_values() * h


def apply_weights(w: DmaWeights, h: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Compute Q H v without a dense matrix: per-strip weighted sums.

    ``v`` may be a single (N,) vector or a batch (..., N); the output has
    the trailing axis reduced to N_d.
    """
    wh = combined_weights(w, h)
    v = np.asarray(v, dtype=complex)
    n = wh.shape[0]
    if v.shape[-1] != n:
        raise ConfigurationError(f"input has trailing dim {v.shape[-1]}, expected {n}")
    prod = v * wh
    return prod.reshape(v.shape[:-1] + (w.n_strips, w.n_elements_per_strip)).sum(axis=-1)


def save_weights_csv(w: DmaWeights, path):
    """Write rows (i, l, phase_radians, regime); phases at full precision."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "l", "phase_radians", "regime"])
            for i in range(w.n_strips):
                for l in range(w.n_elements_per_strip):
                    writer.writerow([i, l, repr(float(w.phases[i, l])), w.regime])
    except OSError as exc:
        raise OSError(f"failed to write weights CSV {path}: {exc}") from exc


def load_weights_csv(path) -> DmaWeights:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise OSError(f"failed to read weights CSV {path}: {exc}") from exc
    if not rows:
        raise ConfigurationError(f"weights CSV {path} is empty")
    regimes = {row["regime"] for row in rows}
    if len(regimes) != 1:
        raise ConfigurationError(f"weights CSV {path} mixes regimes {sorted(regimes)}")
    nd = max(int(row["i"]) for row in rows) + 1
    ne = max(int(row["l"]) for row in rows) + 1
    if len(rows) != nd * ne:
        raise ConfigurationError(f"weights CSV {path} is missing entries")
    phases = np.zeros((nd, ne))
    for row in rows:
        phases[int(row["i"]), int(row["l"])] = float(row["phase_radians"])
    return DmaWeights(phases=phases, regime=regimes.pop())
