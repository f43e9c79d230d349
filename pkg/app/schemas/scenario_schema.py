import math
from typing import Any, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config.setting import settings

C0 = 3e8
BOLTZMANN = 1.380649e-23


# ===== NUMEROLOGY =====
class OfdmNumerology(BaseModel):
    """OFDM timing and frequency parameters (28 GHz, 120 kHz, 4096 x 256 defaults)"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    fc: float = Field(28e9, gt=0, description="Carrier frequency in Hz")
    delta_f: float = Field(120e3, gt=0, description="Subcarrier spacing in Hz")
    nc: int = Field(4096, ge=2, description="Subcarrier count Nc")
    m: int = Field(256, ge=1, description="OFDM symbols per frame M")
    tcp: float = Field(0.59e-6, gt=0, description="Cyclic prefix duration in s")

    @property
    def td(self) -> float:
        return 1.0 / self.delta_f

    @property
    def t(self) -> float:
        return self.tcp + self.td

    @property
    def ts(self) -> float:
        return self.td / self.nc

    @property
    def bandwidth(self) -> float:
        return self.nc * self.delta_f

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.ts

    @property
    def cp_samples(self) -> int:
        return round(self.tcp / self.ts)

    @property
    def symbol_samples(self) -> int:
        return self.nc + self.cp_samples

    @property
    def frame_samples(self) -> int:
        return self.m * self.symbol_samples

    @property
    def wavelength(self) -> float:
        return C0 / self.fc

    @model_validator(mode='after')
    def validate_cyclic_prefix(self):
        cp = self.cp_samples
        if cp < 1 or cp >= self.nc:
            raise ValueError(f'Cyclic prefix must span 1..Nc-1 samples, got {cp}')
        return self


# ===== ARRAY =====
class ArrayGeometry(BaseModel):
    """Transmit and receive ULA description; spacing defaults to half a wavelength"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    nt: int = Field(16, ge=1, description="Transmit element count")
    nr: int = Field(16, ge=1, description="Receive element count")
    wavelength: float = Field(C0 / 28e9, gt=0, description="Carrier wavelength in m")
    dt: Optional[float] = Field(None, gt=0, description="Transmit element spacing in m")
    dr: Optional[float] = Field(None, gt=0, description="Receive element spacing in m")

    @model_validator(mode='before')
    @classmethod
    def default_spacing(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            wavelength = data.get('wavelength') or C0 / 28e9
            for key in ('dt', 'dr'):
                if data.get(key) is None:
                    data[key] = wavelength / 2
        return data


# ===== TARGETS & NOISE =====
class Target(BaseModel):
    """Point target; positive velocity yields a positive Doppler shift"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    range_m: float = Field(..., gt=0, description="Range in m")
    velocity_mps: float = Field(0.0, description="Radial velocity in m/s")
    angle_deg: float = Field(0.0, gt=-90, lt=90, description="Elevation angle in degrees")
    rcs_m2: float = Field(10.0, gt=0, description="Radar cross section in m^2")


class NoiseSpec(BaseModel):
    """Explicit noise power, or a thermal floor kT0B raised by a noise figure"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    sigma2: Optional[float] = Field(None, gt=0, description="Explicit noise power in W")
    temperature_k: float = Field(290.0, gt=0)
    noise_figure_db: float = Field(10.0)

    def resolve(self, bandwidth: float) -> float:
        if self.sigma2 is not None:
            return self.sigma2
        return BOLTZMANN * self.temperature_k * bandwidth * 10 ** (self.noise_figure_db / 10)


DEFAULT_TARGETS = (
    Target(range_m=500.0, velocity_mps=60.0, angle_deg=0.0, rcs_m2=10.0),
    Target(range_m=260.0, velocity_mps=40.0, angle_deg=2.0, rcs_m2=10.0),
)


# ===== SCENARIO =====
class Scenario(BaseModel):
    """Full experiment description; target 0 is the beam-steered UE"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    numerology: OfdmNumerology = Field(default_factory=OfdmNumerology)
    geometry: Optional[ArrayGeometry] = None
    targets: Tuple[Target, ...] = Field(default=DEFAULT_TARGETS, min_length=1)
    pt_dbm: float = 46.0
    gt_db: float = 32.0
    gr_db: float = 32.0
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    music_snapshots: int = Field(256, ge=1)

    @model_validator(mode='before')
    @classmethod
    def default_geometry(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        numerology = data.get('numerology') or OfdmNumerology()
        if isinstance(numerology, dict):
            numerology = OfdmNumerology(**numerology)
        geometry = data.get('geometry')
        if geometry is None:
            data = {**data, 'geometry': {'wavelength': numerology.wavelength}}
        elif isinstance(geometry, dict) and geometry.get('wavelength') is None:
            data = {**data, 'geometry': {**geometry, 'wavelength': numerology.wavelength}}
        return data

    @model_validator(mode='after')
    def validate_targets(self):
        count = len(self.targets)
        if count > self.geometry.nr:
            raise ValueError(f'Target count {count} exceeds receive elements {self.geometry.nr}')
        angles = sorted(target.angle_deg for target in self.targets)
        if any(right - left < 1e-9 for left, right in zip(angles, angles[1:])):
            raise ValueError('Target angles must be pairwise distinct')
        if not math.isclose(self.geometry.wavelength, self.numerology.wavelength, rel_tol=1e-9):
            raise ValueError('Array wavelength does not match the carrier frequency')
        return self

    @property
    def pt_watts(self) -> float:
        return 10 ** ((self.pt_dbm - 30) / 10)

    @property
    def gt_linear(self) -> float:
        return 10 ** (self.gt_db / 10)

    @property
    def gr_linear(self) -> float:
        return 10 ** (self.gr_db / 10)

    @property
    def sigma2(self) -> float:
        return self.noise.resolve(self.numerology.bandwidth)

    def with_updates(self, **changes: Any) -> "Scenario":
        """Return a re-validated copy with top-level fields replaced"""
        return Scenario.model_validate({**self.model_dump(), **changes})

    def with_target_range(self, index: int, range_m: float) -> "Scenario":
        targets = [target.model_dump() for target in self.targets]
        targets[index] = {**targets[index], 'range_m': range_m}
        return self.with_updates(targets=targets)
