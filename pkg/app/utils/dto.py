from app.models.signal_models import DoaEstimate
from app.schemas.experiment_schema import DoaSpectrumResponse
from app.schemas.theory_schema import BlockSinrResponse
from app.services.theory_service import to_db


def map_block_sinr_to_response(value: float, branch: str) -> BlockSinrResponse:
    """Linear block SINR to the API response"""
    return BlockSinrResponse(linear=value, db=to_db(value), branch=branch)


def map_doa_to_response(estimate: DoaEstimate) -> DoaSpectrumResponse:
    """MUSIC estimate with its spectrum in dB"""
    return DoaSpectrumResponse(
        angles_deg=list(estimate.angles_deg),
        requested=estimate.requested,
        under_detected=estimate.under_detected,
        grid_deg=estimate.spectrum.grid_deg.tolist(),
        p_music_db=estimate.spectrum.values_db.tolist(),
    )
