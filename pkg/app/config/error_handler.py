from fastapi import Request
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
from app.config.exceptions import BaseAppException, ValidationError, ConfigurationError, ComputationError
import logging

logger = logging.getLogger(__name__)

# category name and HTTP status per exception family
CATEGORIES = (
    (ValidationError, 'validation', 400),
    (ConfigurationError, 'configuration', 400),
    (ComputationError, 'computation', 422),
)


def classify(exc: BaseAppException):
    for family, category, status in CATEGORIES:
        if isinstance(exc, family):
            return category, status
    return 'simulation', 400


def error_payload(exc: BaseAppException, path: str) -> dict:
    category, _ = classify(exc)
    payload = {
        'error': exc.__class__.__name__,
        'error_code': exc.error_code or 'SIMULATION_ERROR',
        'category': category,
        'message': exc.message,
        'path': path,
    }
    # trial index of a failed Monte-Carlo run, condition number of a rejected manifold
    for attribute in ('trial_index', 'condition'):
        value = getattr(exc, attribute, None)
        if value is not None:
            payload[attribute] = value
    return payload


async def app_exception_handler(request: Request, exc: BaseAppException):
    category, status = classify(exc)
    logger.error(f'Simulator {category} error [{exc.error_code}] on {request.url.path}: {exc.message}')
    return JSONResponse(status_code=status, content=error_payload(exc, request.url.path))


async def validation_exception_handler(request: Request, exc: RequestValidationError):
    logger.error(f"Request validation error on {request.url.path}: {exc.errors()}")

    fields = []
    for error in exc.errors():
        loc = [str(part) for part in error.get('loc', ()) if part != 'body']
        fields.append({
            'field': '.'.join(loc),
            'msg': error.get('msg'),
            'type': error.get('type'),
        })

    return JSONResponse(
        status_code=422,
        content={
            'error': 'ValidationError',
            'error_code': 'INVALID_REQUEST',
            'category': 'validation',
            'message': f'{len(fields)} invalid field(s) in the scenario or request',
            'path': request.url.path,
            'fields': fields,
        }
    )


async def general_exception_handler(request: Request, exc: Exception):
    logger.error(f"Unexpected error: {str(exc)}", exc_info=True)
    return JSONResponse(
        status_code=500,
        content={
            'error': 'InternalServerError',
            'error_code': 'INTERNAL',
            'category': 'internal',
            'message': 'An unexpected error occurred while running the simulation.',
            'path': request.url.path,
        }
    )
