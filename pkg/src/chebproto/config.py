"""Configuration settings for chebproto."""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Numerical and runtime settings loaded from environment variables."""

    # Shared deviation tolerance for witnesses, optimality tests and skip rules
    tolerance: float = Field(default=1e-9, alias="CHEBPROTO_TOLERANCE", gt=0)

    # Simplex pivot threshold
    pivot_tolerance: float = Field(default=1e-10, alias="CHEBPROTO_PIVOT_TOLERANCE", gt=0)

    # Interpolation systems whose scaled reciprocal condition falls below this are singular
    singularity_threshold: float = Field(
        default=1e-12,
        alias="CHEBPROTO_SINGULARITY_THRESHOLD",
        gt=0,
    )

    # Sampled Chebyshev-system verification
    degeneracy_tolerance: float = Field(
        default=1e-10,
        alias="CHEBPROTO_DEGENERACY_TOLERANCE",
        gt=0,
    )
    sample_budget: int = Field(default=1000, alias="CHEBPROTO_SAMPLE_BUDGET", ge=1)
    sample_seed: int = Field(default=0, alias="CHEBPROTO_SAMPLE_SEED")

    # Iteration limits
    exchange_max_iter: int = Field(default=500, alias="CHEBPROTO_EXCHANGE_MAX_ITER", ge=1)
    lp_max_iter: int = Field(default=20_000, alias="CHEBPROTO_LP_MAX_ITER", ge=1)
    max_outer_iter: int = Field(default=50, alias="CHEBPROTO_MAX_OUTER_ITER", ge=1)

    # Clustering
    seed: int = Field(default=0, alias="CHEBPROTO_SEED")
    workers: int = Field(default=1, alias="CHEBPROTO_WORKERS", ge=1)

    log_level: str = Field(default="WARNING", alias="CHEBPROTO_LOG_LEVEL")

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "extra": "ignore",
    }


@lru_cache
def get_settings() -> Settings:
    """Get settings instance (lazy-loaded, cached)."""
    return Settings()  # type: ignore[call-arg]
