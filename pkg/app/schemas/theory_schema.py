from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.utils.enums import RdmSinrMethod

MEAN_INV_QAM16_POWER = 17.0 / 9.0


# ===== BLOCK SINR =====
class BlockSinrInputs(BaseModel):
    """Sample counts as fractions of Nc plus the interference-free block SNR"""
    model_config = ConfigDict(frozen=True)

    ne_tilde: float = Field(..., ge=0, le=1)
    na_tilde: float = Field(0.0, ge=0, le=1)
    ns_tilde: float = Field(..., ge=0, le=1)
    gamma0: float = Field(..., gt=0)
    fd_t: float = Field(0.0, description="Doppler shift times symbol period")

    @model_validator(mode='after')
    def validate_offsets(self):
        if self.ne_tilde > self.ns_tilde + 1e-12:
            raise ValueError('ne_tilde cannot exceed ns_tilde')
        return self


class BlockSinrResponse(BaseModel):
    linear: float
    db: float
    branch: str


class OptimalNaRequest(BaseModel):
    ne: int = Field(..., ge=0)
    ns: int = Field(..., ge=0)
    nc: int = Field(..., ge=1)
    gamma0: float = Field(..., gt=0)
    fd_t: float = 0.0

    @model_validator(mode='after')
    def validate_order(self):
        if self.ne > self.ns:
            raise ValueError('ne cannot exceed ns')
        if self.ns > self.nc:
            raise ValueError('ns cannot exceed nc')
        return self


class OptimalNaResult(BaseModel):
    ne_samples: int
    ns_samples: int
    sinr_at_ne: float
    sinr_at_ns: float
    argmax: int
    sinr_max_db: float


# ===== RDM SINR =====
class RdmSinrInputs(BaseModel):
    """Per-target link quantities for the range-Doppler SINR closed forms.

    For the traditional method `lambda_u` carries the combiner norm ||w_rx||^2;
    for the separation-based methods it is the stream noise amplification.
    """
    model_config = ConfigDict(frozen=True)

    ne_tilde: float = Field(..., ge=0, le=1)
    na_tilde: float = Field(0.0, ge=0, le=1)
    ns_tilde: float = Field(..., ge=0, le=1)
    fd_t: float = 0.0
    m: int = Field(..., ge=1)
    nc: int = Field(..., ge=1)
    lambda_u: float = Field(..., gt=0)
    sigma2: float = Field(..., ge=0)
    gain2: float = Field(..., gt=0, description="|alpha_u aT(theta_u) w_tx|^2")
    symbol_power: float = Field(1.0, gt=0)
    mean_inv_symbol_power: float = Field(MEAN_INV_QAM16_POWER, ge=1)


class TargetLink(BaseModel):
    """Gain and CP overrun of one target as seen through a common combiner"""
    gain2: float = Field(..., ge=0)
    ne_tilde: float = Field(..., ge=0, le=1)


class RdmSinrRequest(BaseModel):
    method: RdmSinrMethod
    inputs: RdmSinrInputs
    links: Optional[List[TargetLink]] = None


# ===== RANGE =====
class RangeReport(BaseModel):
    max_unambiguous_range_m: float
    max_cp_range_m: float
    range_resolution_m: float
    velocity_resolution_mps: float
