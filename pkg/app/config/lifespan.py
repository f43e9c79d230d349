import logging
from contextlib import asynccontextmanager
from pathlib import Path
from fastapi import FastAPI
from app.config.logging import setup_logging
from app.config.setting import settings

logger = logging.getLogger(__name__)

@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan events"""
    # Startup
    setup_logging(settings.LOG_LEVEL, settings.LOG_FILE)
    logger.info("Starting up simulator API...")

    output_dir = Path(settings.OUTPUT_DIR)
    output_dir.mkdir(parents=True, exist_ok=True)
    app.state.output_dir = output_dir
    logger.info(f"Artifacts directory: {output_dir.resolve()}")

    yield

    # Shutdown
    logger.info("Simulator API shutdown complete")
