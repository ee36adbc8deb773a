"""XR frame generation: truncated-Gaussian sizes, Gamma inter-arrival times."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


DEFAULT_SIGMA_FRACTION = 1.0 / 6.0
DEFAULT_GAMMA_SHAPE = 4.0
DEFAULT_FPS = 20.0

PRESET_DATARATES = {
    "experimental": 1.152e6,
    "2K": 40e6,
    "4K": 90e6,
    "8K": 360e6,
}


@dataclass(frozen=True)
class TrafficProfile:
    label: str
    datarate_bps: float
    fps: float = DEFAULT_FPS
    size_sigma_fraction: float = DEFAULT_SIGMA_FRACTION
    trunc_low: float = 0.5
    trunc_high: float = 1.5
    interarrival_mean: int | None = None
    gamma_shape: float = DEFAULT_GAMMA_SHAPE

    def __post_init__(self):
        if self.interarrival_mean is None:
            object.__setattr__(self, "interarrival_mean", int(round(1e9 / self.fps)) if self.fps > 0 else 0)
        if self.datarate_bps <= 0 or self.fps <= 0:
            raise ValueError(f"profile {self.label!r}: datarate and fps must be positive")
        if not 0 < self.trunc_low < 1 < self.trunc_high:
            raise ValueError(f"profile {self.label!r}: need 0 < trunc_low < 1 < trunc_high")
        if self.interarrival_mean <= 0 or self.gamma_shape <= 0:
            raise ValueError(f"profile {self.label!r}: interarrival_mean and gamma_shape must be positive")
        if self.size_sigma_fraction < 0:
            raise ValueError(f"profile {self.label!r}: size_sigma_fraction must be >= 0")

    @property
    def mean_frame_bits(self) -> float:
        return self.datarate_bps / self.fps

    @property
    def gamma_scale(self) -> float:
        return self.interarrival_mean / self.gamma_shape

    def scaled(self, factor: float) -> "TrafficProfile":
        return replace(self, datarate_bps=self.datarate_bps * factor)


def profile_for(resolution: str, **overrides) -> TrafficProfile:
    """Preset profile by name (``experimental``, ``2K``, ``4K``, ``8K``)."""
    key = resolution.upper() if resolution.upper() in PRESET_DATARATES else resolution
    if key not in PRESET_DATARATES:
        known = ", ".join(PRESET_DATARATES)
        raise KeyError(f"unknown resolution {resolution!r}; known presets: {known}")
    return TrafficProfile(label=key, datarate_bps=PRESET_DATARATES[key], **overrides)


def sample_frame_size(profile: TrafficProfile, rng: np.random.Generator) -> int:
    mu = profile.mean_frame_bits
    lo, hi = profile.trunc_low * mu, profile.trunc_high * mu
    sigma = profile.size_sigma_fraction * mu
    if sigma == 0:
        return int(round(mu))
    # rejection, not clamping: clamping piles probability mass on the bounds
    while True:
        x = rng.normal(mu, sigma)
        if lo <= x <= hi:
            s = int(round(x))
            # rounding can step just outside a non-integer bound
            return min(max(s, int(np.ceil(lo))), int(np.floor(hi)))


def sample_interarrival(profile: TrafficProfile, rng: np.random.Generator) -> int:
    while True:
        gap = int(round(rng.gamma(profile.gamma_shape, profile.gamma_scale)))
        if gap > 0:
            return gap


@dataclass
class XrFrame:
    frame_id: int
    stream_id: str
    size_bits: int
    gen_time: int


@dataclass
class FrameStream:
    stream_id: str
    profile: TrafficProfile
    start_offset: int = 0
    next_id: int = 0
    last_gen: int | None = None
    emitted_bits: int = field(default=0)

    def next_frame(self, rng: np.random.Generator) -> XrFrame:
        if self.last_gen is None:
            t = self.start_offset
        else:
            t = self.last_gen + sample_interarrival(self.profile, rng)
        frame = XrFrame(self.next_id, self.stream_id, sample_frame_size(self.profile, rng), t)
        self.next_id += 1
        self.last_gen = t
        self.emitted_bits += frame.size_bits
        return frame


def next_frame(stream: FrameStream, rng: np.random.Generator) -> XrFrame:
    return stream.next_frame(rng)
