"""Narrow-band channel models for a uniform linear transmit array.

Two generators are provided. The sparse geometric model sums a small
number of plane-wave departure paths, each with a complex Gaussian gain
and a departure angle drawn uniformly on [-pi/2, pi/2]:

    h = sum_l alpha_l * a(theta_l)

where ``a`` is the array steering vector. The i.i.d. complex Gaussian
model is the classical rich-scattering baseline. Both are deterministic
functions of a seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import substream

SPEED_OF_LIGHT_M_S = 299_792_458.0

MMWAVE = "mmwave"
RAYLEIGH = "rayleigh"
CHANNEL_KINDS = (MMWAVE, RAYLEIGH)


@dataclass(frozen=True)
class SteeringConfig:
    """Array geometry used when evaluating steering vectors.

    ``spacing_over_wavelength`` is d/lambda for a uniform linear array;
    half-wavelength spacing (0.5) is the default.
    """

    carrier_frequency_hz: float = 60e9
    spacing_over_wavelength: float = 0.5

    def __post_init__(self) -> None:
        if not self.carrier_frequency_hz > 0:
            raise ValueError("carrier frequency must be positive")
        if not self.spacing_over_wavelength > 0:
            raise ValueError("antenna spacing ratio must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.carrier_frequency_hz


@dataclass(frozen=True, eq=False)
class PathSet:
    """Gains and departure angles of a sparse geometric channel."""

    gains: np.ndarray
    angles: np.ndarray

    def __post_init__(self) -> None:
        gains = np.asarray(self.gains, dtype=np.complex128)
        angles = np.asarray(self.angles, dtype=np.float64)
        if gains.ndim != 1 or angles.ndim != 1 or gains.size != angles.size:
            raise ValueError("gains and angles must be 1-D arrays of equal length")
        if gains.size < 1:
            raise ValueError("at least one path is required")
        if np.any(np.abs(angles) > np.pi / 2):
            raise ValueError("departure angles must lie in [-pi/2, pi/2]")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "angles", angles)

    @property
    def n_paths(self) -> int:
        return self.gains.size


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """A channel vector together with how it was generated."""

    h: np.ndarray
    kind: str
    paths: PathSet | None = None
    seed: int | None = None

    @property
    def n_antennas(self) -> int:
        return self.h.size


def steering_vector(
    theta: float, n_antennas: int, cfg: SteeringConfig | None = None
) -> np.ndarray:
    """Transmit steering vector of a uniform linear array.

    Element m (0-based) is ``exp(j * 2*pi * (d/lambda) * m * sin(theta))``,
    so element 0 is always 1 and every element has unit modulus.
    """
    if cfg is None:
        cfg = SteeringConfig()
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    if n_antennas < 1:
        raise ValueError("n_antennas must be at least 1")
    m = np.arange(n_antennas)
    phase = 2.0 * np.pi * cfg.spacing_over_wavelength * np.sin(theta)
    return np.exp(1j * phase * m)


def channel_from_paths(
    paths: PathSet, n_antennas: int, cfg: SteeringConfig | None = None
) -> np.ndarray:
    """Reconstruct ``h = sum_l alpha_l a(theta_l)`` from an explicit path set."""
    if cfg is None:
        cfg = SteeringConfig()
    h = np.zeros(n_antennas, dtype=np.complex128)
    for gain, angle in zip(paths.gains, paths.angles):
        h += gain * steering_vector(float(angle), n_antennas, cfg)
    return h


def sample_mmwave_channel(
    n_paths: int,
    n_antennas: int,
    cfg: SteeringConfig | None = None,
    seed: int = 0,
) -> ChannelRealization:
    """Draw one sparse geometric channel, deterministically from ``seed``.

    Path gains are i.i.d. CN(0, 1); departure angles are i.i.d. uniform on
    [-pi/2, pi/2]. The stored path set reproduces ``h`` exactly through
    :func:`channel_from_paths`.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    if cfg is None:
        cfg = SteeringConfig()
    rng = substream(seed)
    gains = (
        rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)
    ) / np.sqrt(2.0)
    angles = rng.uniform(-np.pi / 2, np.pi / 2, n_paths)
    paths = PathSet(gains=gains, angles=angles)
    h = channel_from_paths(paths, n_antennas, cfg)
    return ChannelRealization(h=h, kind=MMWAVE, paths=paths, seed=seed)


def sample_rayleigh_channel(n_antennas: int, seed: int = 0) -> ChannelRealization:
    """Draw one i.i.d. CN(0, 1) channel vector, deterministically from ``seed``."""
    if n_antennas < 1:
        raise ValueError("n_antennas must be at least 1")
    rng = substream(seed)
    h = (
        rng.standard_normal(n_antennas) + 1j * rng.standard_normal(n_antennas)
    ) / np.sqrt(2.0)
    return ChannelRealization(h=h, kind=RAYLEIGH, paths=None, seed=seed)


def sample_mmwave_batch(
    n_trials: int,
    n_paths: int,
    n_antennas: int,
    cfg: SteeringConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized bulk sampler used by sweeps; one channel per row.

    Statistically identical to repeated :func:`sample_mmwave_channel`
    draws but consumes a caller-provided stream, so sweep blocks stay
    reproducible under the substream scheme.
    """
    gains = (
        rng.standard_normal((n_trials, n_paths))
        + 1j * rng.standard_normal((n_trials, n_paths))
    ) / np.sqrt(2.0)
    angles = rng.uniform(-np.pi / 2, np.pi / 2, (n_trials, n_paths))
    m = np.arange(n_antennas)
    steer = np.exp(
        1j
        * 2.0
        * np.pi
        * cfg.spacing_over_wavelength
        * np.sin(angles)[:, :, None]
        * m[None, None, :]
    )
    return np.einsum("bl,blm->bm", gains, steer)


def sample_rayleigh_batch(
    n_trials: int, n_antennas: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized bulk sampler for the i.i.d. Gaussian baseline."""
    shape = (n_trials, n_antennas)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
