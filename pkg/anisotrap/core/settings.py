from functools import lru_cache

from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .constant import (
    BOUNDARY_MASS_TOL,
    BULK_MARGIN,
    CONSTRAINT_TOL,
    DEFAULT_OMEGA_FLOOR,
    ENTIRE_DEGREE_CAP,
    FOCK_DEGREE_GUARD,
    MATRIX_TOL,
    OVERDETERMINED_TOL,
    REGIME_THRESHOLDS,
    ZERO_FLOOR,
)


class AnisotrapSettings(BaseSettings):
    """
    프로세스 단위 설정. 환경변수 ANISOTRAP_* 또는 .env 로 덮어쓸 수 있다.
    """

    model_config = SettingsConfigDict(
        env_prefix="ANISOTRAP_", env_file=".env", extra="ignore"
    )

    omega_floor: float = Field(default=DEFAULT_OMEGA_FLOOR, gt=0.0)
    matrix_tol: float = Field(default=MATRIX_TOL, gt=0.0)
    constraint_tol: float = Field(default=CONSTRAINT_TOL, gt=0.0)
    overdetermined_tol: float = Field(default=OVERDETERMINED_TOL, gt=0.0)
    regime_low: float = Field(default=REGIME_THRESHOLDS["low"], gt=0.0)
    regime_high: float = Field(default=REGIME_THRESHOLDS["high"], gt=0.0)
    degree_cap: int = Field(default=ENTIRE_DEGREE_CAP, ge=0)
    fock_guard: int = Field(default=FOCK_DEGREE_GUARD, ge=0)
    zero_floor: float = Field(default=ZERO_FLOOR, gt=0.0)
    bulk_margin: float = Field(default=BULK_MARGIN, gt=0.0, le=1.0)
    boundary_mass_tol: float = Field(default=BOUNDARY_MASS_TOL, gt=0.0)
    n_jobs: int = Field(default=1, description="joblib 병렬 작업 수")
    history_url: str = Field(default="sqlite:///anisotrap_runs.db")

    @model_validator(mode="after")
    def check_thresholds(self):
        if self.regime_low >= self.regime_high:
            raise ValueError(
                f"regime_low({self.regime_low}) 는 regime_high({self.regime_high}) 보다 작아야 합니다"
            )
        return self


@lru_cache(maxsize=1)
def get_settings() -> AnisotrapSettings:
    return AnisotrapSettings()
