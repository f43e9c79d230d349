"""Array-backed value types passed between the simulator services.

All containers are frozen; services never mutate an input array in place.
"""
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from app.utils.enums import ArraySide


# ===== TIMING =====
@dataclass(frozen=True)
class SampleOffsets:
    ne: int
    ns: int


# ===== WAVEFORM =====
@dataclass(frozen=True, eq=False)
class SymbolGrid:
    """Nc x M frequency-domain modulation symbols"""
    data: np.ndarray

    @property
    def nc(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class TimeSignal:
    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True, eq=False)
class MultiAntennaSignal:
    """Nr x samples complex baseband receive matrix"""
    data: np.ndarray
    sample_rate: float

    @property
    def nr(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


# ===== ARRAY =====
@dataclass(frozen=True, eq=False)
class SteeringVector:
    elements: np.ndarray
    angle_deg: float
    side: ArraySide


@dataclass(frozen=True, eq=False)
class Manifold:
    columns: np.ndarray
    angles_deg: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class SeparationOperator:
    """LS separation matrix and the per-stream noise amplification factors"""
    pinv: np.ndarray
    lambdas: np.ndarray
    angles_deg: Tuple[float, ...]
    condition: float


# ===== CHANNEL =====
@dataclass(frozen=True)
class Attenuation:
    complex_gain: complex
    rcs: float
    path_loss: float
    phase: complex
    power_scale: float


# ===== DOA =====
@dataclass(frozen=True, eq=False)
class SubspaceSplit:
    signal_basis: np.ndarray
    noise_basis: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True, eq=False)
class MusicSpectrum:
    grid_deg: np.ndarray
    values: np.ndarray

    @property
    def values_db(self) -> np.ndarray:
        return 10 * np.log10(self.values)


@dataclass(frozen=True, eq=False)
class DoaEstimate:
    angles_deg: Tuple[float, ...]
    requested: int
    spectrum: MusicSpectrum

    @property
    def under_detected(self) -> bool:
        return len(self.angles_deg) < self.requested


# ===== RECEIVER =====
@dataclass(frozen=True, eq=False)
class SeparatedStream:
    samples: np.ndarray
    target_index: int
    lambda_u: float
    angle_deg: float


@dataclass(frozen=True, eq=False)
class CompensatedBlock:
    samples: np.ndarray
    na_requested: int
    na_applied: int

    @property
    def partial(self) -> bool:
        return self.na_applied < self.na_requested


@dataclass(frozen=True, eq=False)
class ReceivedGrid:
    """Demodulated Nc x M grid; lists symbols whose compensation window was clipped"""
    data: np.ndarray
    na: int
    partial_symbols: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def partially_compensated(self) -> bool:
        return bool(self.partial_symbols)


@dataclass(frozen=True, eq=False)
class RangeDopplerMap:
    bins: np.ndarray
    range_axis_m: np.ndarray
    velocity_axis_mps: np.ndarray

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.bins) ** 2

    @property
    def shape(self) -> Tuple[int, int]:
        return self.bins.shape

    def peak(self) -> Tuple[int, int]:
        k, l = np.unravel_index(np.argmax(self.power), self.bins.shape)
        return int(k), int(l)


@dataclass(frozen=True)
class Detection:
    k: int
    l: int
    power: float
    threshold: float
