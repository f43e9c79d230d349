from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config.setting import settings
from app.schemas.scenario_schema import Scenario
from app.utils.enums import Method, NaPolicy, SweepKind


# ===== EXPERIMENT SCHEMAS =====
class ExperimentSpec(BaseModel):
    """One sweep of Monte-Carlo trials over the chosen receive methods"""
    model_config = ConfigDict(frozen=True)

    scenario: Scenario = Field(default_factory=Scenario)
    sweep: SweepKind = Field(SweepKind.NONE, description="Quantity varied between sweep points")
    values: List[float] = Field(default_factory=list, description="Sweep points")
    methods: List[Method] = Field(default_factory=lambda: list(Method), min_length=1)
    trials: int = Field(default_factory=lambda: settings.DEFAULT_TRIALS, ge=1)
    na_policy: NaPolicy = NaPolicy.OPTIMAL
    design_range_m: float = Field(500.0, gt=0, description="Range whose Ns the fixed policy uses")
    oracle_angles: bool = Field(False, description="Skip MUSIC and separate with the true angles")
    estimate_sources: bool = Field(False, description="Estimate the source count from eigenvalues")
    pfa: float = Field(default_factory=lambda: settings.PFA, gt=0, lt=1)
    cfar_train: int = Field(default_factory=lambda: settings.CFAR_TRAIN, ge=1)
    cfar_guard: int = Field(default_factory=lambda: settings.CFAR_GUARD, ge=0)
    swept_target: int = Field(0, ge=0, description="Target moved by a range sweep")
    max_workers: int = Field(default_factory=lambda: settings.MAX_WORKERS, ge=1)

    @field_validator('methods')
    @classmethod
    def unique_methods(cls, v):
        return list(dict.fromkeys(v))

    @model_validator(mode='after')
    def validate_sweep(self):
        if self.sweep != SweepKind.NONE and not self.values:
            raise ValueError(f'Sweep "{self.sweep.value}" needs at least one value')
        if self.swept_target >= len(self.scenario.targets):
            raise ValueError(f'swept_target {self.swept_target} has no matching target')
        if self.sweep == SweepKind.NA:
            nc = self.scenario.numerology.nc
            for value in self.values:
                if value != int(value) or not 0 <= value <= nc:
                    raise ValueError(f'Compensation lengths must be integers in [0, {nc}], got {value}')
        if self.sweep == SweepKind.RANGE_M and any(value <= 0 for value in self.values):
            raise ValueError('Swept ranges must be positive')
        return self

    def sweep_points(self) -> List[Optional[float]]:
        if self.sweep == SweepKind.NONE:
            return [None]
        return list(self.values)


class ResultRow(BaseModel):
    """Aggregate of one (sweep point, method, target) cell"""
    sweep_value: Optional[float] = None
    method: Method
    target_index: int
    sinr_rdm_db_sim: Optional[float] = None
    sinr_rdm_db_theory: Optional[float] = None
    pd: float = Field(..., ge=0, le=1)
    pd_ci95: Tuple[float, float]
    trials_used: int = Field(..., ge=0)
    trials: int = Field(..., ge=1)


class ExperimentResponse(BaseModel):
    sweep: SweepKind
    rows: List[ResultRow]
    elapsed_s: float


# ===== DOA SCHEMAS =====
class DoaSpectrumResponse(BaseModel):
    angles_deg: List[float]
    requested: int
    under_detected: bool
    grid_deg: List[float]
    p_music_db: List[float]
