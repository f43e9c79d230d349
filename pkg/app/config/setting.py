from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional

class Settings(BaseSettings):
    LOG_LEVEL: str = 'INFO'
    LOG_FILE: Optional[str] = None

    OUTPUT_DIR: str = 'results'
    DEFAULT_TRIALS: int = 200
    MAX_WORKERS: int = 1
    DEFAULT_SEED: int = 2024

    # detector / estimator defaults
    PFA: float = 1e-11
    CFAR_TRAIN: int = 16
    CFAR_GUARD: int = 4
    SINR_GUARD_RANGE: int = 8
    SINR_GUARD_DOPPLER: int = 4
    MUSIC_GRID_STEP_DEG: float = 0.01
    MUSIC_FLOOR: float = 1e-12
    MANIFOLD_COND_LIMIT: float = 1e8

    ENVIRONMENT: str = 'development'
    DEBUG: bool = False

    model_config = SettingsConfigDict(
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore'
    )

settings = Settings()
