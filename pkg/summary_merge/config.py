"""
Summary Merge - Configuration Settings
"""
from functools import lru_cache


class Settings:
    """Fixed numerical and presentation settings."""

    # Tolerances (relative)
    BENIGN_RTOL: float = 1e-12
    ADVERSARIAL_RTOL: float = 1e-9
    FOLD_RTOL: float = 1e-10

    # Negative M2 within CLAMP_RTOL * max(1, m2 scale) is rounding noise
    CLAMP_RTOL: float = 1e-9

    # Above this |mean| / sd ratio, check judges with ADVERSARIAL_RTOL
    CONDITION_LIMIT: float = 1e3

    # CLI defaults
    DEFAULT_KERNEL: str = "stable"
    DEFAULT_PRECISION: int = 6
    MIN_PRECISION: int = 1
    MAX_PRECISION: int = 17

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(levelname)s %(name)s: %(message)s"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
