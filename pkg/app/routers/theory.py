from fastapi import APIRouter
from pydantic import ValidationError as PydanticValidationError

from app.config.exceptions import ValidationError
from app.schemas.scenario_schema import OfdmNumerology
from app.schemas.theory_schema import (
    BlockSinrInputs,
    BlockSinrResponse,
    OptimalNaRequest,
    OptimalNaResult,
    RangeReport,
    RdmSinrRequest,
)
from app.services.theory_service import theory_service
from app.utils.dto import map_block_sinr_to_response

router = APIRouter()


@router.get('/ranges', response_model=RangeReport)
async def get_ranges(fc: float = 28e9, delta_f: float = 120e3, nc: int = 4096, m: int = 256, tcp: float = 0.59e-6):
    try:
        num = OfdmNumerology(fc=fc, delta_f=delta_f, nc=nc, m=m, tcp=tcp)
    except PydanticValidationError as e:
        raise ValidationError(f"Invalid numerology: {e.errors()[0]['msg']}", "INVALID_NUMEROLOGY")
    return theory_service.max_range_report(num)


@router.post('/block-sinr', response_model=BlockSinrResponse)
async def block_sinr(data: BlockSinrInputs):
    value = theory_service.sinr_block_after(data)
    return map_block_sinr_to_response(value, theory_service.block_branch(data))


@router.post('/rdm-sinr', response_model=BlockSinrResponse)
async def rdm_sinr(data: RdmSinrRequest):
    value = theory_service.sinr_rdm(data.method, data.inputs, data.links)
    return map_block_sinr_to_response(value, data.method.value)


@router.post('/optimal-na', response_model=OptimalNaResult)
async def optimal_na(data: OptimalNaRequest):
    return theory_service.optimal_na(data)
