# ============================================================================
# app/gallai_covers/config/settings.py - Application Configuration
# ============================================================================

from functools import lru_cache
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings with environment variable support (prefix GALLAI_)"""

    model_config = SettingsConfigDict(
        env_prefix="GALLAI_",
        env_file=".env",
        extra="ignore",
    )

    # Basic Application Settings
    APP_NAME: str = "gallai-covers"
    APP_VERSION: str = "1.0.0"

    # Logging Configuration
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    LOG_FILE: Optional[str] = None

    # Randomness; GALLAI_SEED is the default for every --seed option
    SEED: int = 0

    # Oracle Settings
    ORACLE_EDGE_CAP: int = 14
    ORACLE_NODE_LIMIT: int = 5_000_000

    # Construction checks (per-node budget/type asserts, per-group verification)
    CHECK_INVARIANTS: bool = False

    # Batch Settings
    FUZZ_WORKERS: int = 1
    BENCH_REPEATS: int = 1

    # Random series-parallel generator
    SP_SERIES_BIAS: float = 0.5
    SP_CHORD_RATE: float = 0.15

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            raise ValueError("LOG_LEVEL must be DEBUG, INFO, WARNING, ERROR or CRITICAL")
        return level

    @field_validator("SP_SERIES_BIAS", "SP_CHORD_RATE")
    @classmethod
    def validate_probability(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
        return v


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


# Global settings instance
settings = get_settings()
