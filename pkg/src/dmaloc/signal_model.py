"""Near-field channel, waveguide response, and snapshot generation.

The element-domain observation per snapshot is ``x = g * x0 + z`` with a
spherical-wavefront channel ``g`` and circularly-symmetric complex Gaussian
noise ``z``.  A metasurface front end compresses ``x`` to one output per
microstrip, ``y = Q H x``; the fully-digital front end observes ``x``
directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .geometry import ArrayLayout, PolarPosition, phase_delay, source_distances, wavelength
from .seeding import SeedLike

GAIN_MODELS = ("unit", "free_space")


def amplitude_coefficient(gain_model: str, carrier_hz: float) -> float:
    """Scale factor for the kernel's per-element amplitude ``a = coef / d``.

    0.0 encodes the unit-gain model (a = 1 regardless of distance).
    """
    if gain_model == "unit":
        return 0.0
    if gain_model == "free_space":
        return wavelength(carrier_hz) / (4.0 * np.pi)
    raise ConfigurationError(f"unknown gain model {gain_model!r}")


def response_vector(layout: ArrayLayout, position: PolarPosition,
                    carrier_hz: float, gain_model: str = "unit") -> np.ndarray:
    """Array response a * exp(-j v) at ``position``, shape (N,).

    Evaluated at the true source this is the channel vector; evaluated at a
    candidate it is the steering vector.
    """
    dist = source_distances(layout, position)
    v = phase_delay(dist, carrier_hz)
    s = np.exp(-1j * v)
    coef = amplitude_coefficient(gain_model, carrier_hz)
    if coef != 0.0:
        s *= coef / dist
    return s


@dataclass(frozen=True)
class ChannelRealization:
    """Deterministic part of the received signal for one true source."""

    g: np.ndarray  # (N,) complex
    gain_model: str
    carrier_hz: float
    source: PolarPosition

    @property
    def n_elements(self) -> int:
        return self.g.shape[0]


def build_channel(layout: ArrayLayout, src: PolarPosition, carrier_hz: float,
                  gain_model: str = "unit") -> ChannelRealization:
    g = response_vector(layout, src, carrier_hz, gain_model)
    return ChannelRealization(g=g, gain_model=gain_model,
                              carrier_hz=carrier_hz, source=src)


@dataclass(frozen=True)
class WaveguideModel:
    """Propagation inside each microstrip: attenuation ``alpha`` (Np/m) and
    wavenumber ``beta`` (rad/m), scalar or one value per strip."""

    alpha: float | np.ndarray = 0.5
    beta: float | np.ndarray = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.alpha) < 0):
            raise ValueError("waveguide attenuation must be non-negative")
        if np.any(np.asarray(self.beta) <= 0):
            raise ValueError("waveguide wavenumber must be positive")

    def per_strip(self, n_strips: int) -> tuple[np.ndarray, np.ndarray]:
        alpha = np.broadcast_to(np.asarray(self.alpha, dtype=float), (n_strips,))
        beta = np.broadcast_to(np.asarray(self.beta, dtype=float), (n_strips,))
        return alpha, beta


def default_waveguide(carrier_hz: float, alpha: float = 0.5) -> WaveguideModel:
    """Mild attenuation, wavenumber matched to the carrier (2*pi/lambda)."""
    return WaveguideModel(alpha=alpha, beta=2.0 * np.pi / wavelength(carrier_hz))


def build_waveguide_matrix(layout: ArrayLayout, model: WaveguideModel) -> np.ndarray:
    """Diagonal of the N x N waveguide matrix H, returned as an (N,) vector.

    Entry (i, l) is ``exp(-rho_il * (alpha_i + j beta_i))``; the matrix is
    never materialised densely.
    """
    alpha, beta = model.per_strip(layout.n_microstrips)
    rho = layout.feed_distances_m
    h = np.exp(-rho * (alpha[:, None] + 1j * beta[:, None]))
    return h.reshape(-1)


@dataclass(frozen=True)
class SnapshotBatch:
    """T observation vectors with the ground truth that generated them.

    ``observations`` has shape (T, N) for a fully-digital front end and
    (T, N_d) for a DMA front end.
    """

    observations: np.ndarray
    snapshot_count: int
    noise_power: float
    pilot: complex
    seed: object
    truth: PolarPosition

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=np.complex128)
        object.__setattr__(self, "observations", obs)
        if obs.ndim != 2 or obs.shape[0] != self.snapshot_count:
            raise ValueError("observations must have shape (T, dim)")
        if self.snapshot_count < 1:
            raise ValueError("need at least one snapshot")

    @property
    def dim(self) -> int:
        return self.observations.shape[1]


def noise_power_from_snr_db(snr_db: float) -> float:
    """Per-element noise power for unit pilot power: delta^2 = 10^(-SNR/10)."""
    return 10.0 ** (-snr_db / 10.0)


def sample_snapshots(channel: ChannelRealization, h: np.ndarray | None = None,
                     weights=None, snapshots: int = 64, noise_power: float = 0.0,
                     seed: SeedLike | None = None, pilot: complex = 1.0) -> SnapshotBatch:
    """Draw T snapshots ``x_t = g x0 + z_t`` and apply the front end.

    With ``weights`` (a DmaWeights instance) the output is ``y_t = Q H x_t``;
    without, the fully-digital ``x_t`` is returned.  Noise entries are
    i.i.d. circularly-symmetric complex Gaussian with variance
    ``noise_power``.  Deterministic given ``seed``.
    """
    if snapshots < 1:
        raise ValueError("need at least one snapshot")
    if noise_power < 0:
        raise ValueError("noise power must be non-negative")
    n = channel.n_elements
    rng = np.random.default_rng(seed)
    x = np.tile(channel.g * pilot, (snapshots, 1))
    if noise_power > 0:
        scale = np.sqrt(noise_power / 2.0)
        x = x + scale * (rng.standard_normal((snapshots, n))
                         + 1j * rng.standard_normal((snapshots, n)))
    if weights is None:
        obs = x
    else:
        if h is None:
            raise ConfigurationError("waveguide diagonal h is required for a DMA front end")
        from .dma import apply_weights
        obs = apply_weights(weights, h, x)
    return SnapshotBatch(observations=obs, snapshot_count=snapshots,
                         noise_power=noise_power, pilot=pilot, seed=seed,
                         truth=channel.source)
