import time

from fastapi import APIRouter
from starlette.concurrency import run_in_threadpool

from app.schemas.experiment_schema import DoaSpectrumResponse, ExperimentResponse, ExperimentSpec
from app.schemas.scenario_schema import Scenario
from app.services.experiment_service import experiment_service
from app.utils.dto import map_doa_to_response

router = APIRouter()


@router.post('/run', response_model=ExperimentResponse)
async def run_experiment(spec: ExperimentSpec):
    started = time.perf_counter()
    rows = await run_in_threadpool(experiment_service.run_experiment, spec)
    return ExperimentResponse(sweep=spec.sweep, rows=rows, elapsed_s=time.perf_counter() - started)


@router.post('/doa-spectrum', response_model=DoaSpectrumResponse)
async def doa_spectrum(scenario: Scenario):
    estimate = await run_in_threadpool(experiment_service.doa_spectrum, scenario)
    return map_doa_to_response(estimate)
