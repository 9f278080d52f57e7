"""
축약 에너지 E(u) = ∫ ½(ε²x₁² + κ²x₂²)|u|² + (g₀/2)|u|⁴ 와 원래 에너지로의 역사상
"""

import math
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from anisotrap.core.constant import INTERMEDIATE, STRONG, WEAK
from anisotrap.core.errors import GridError, InvalidParameterError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.core.settings import get_settings
from anisotrap.tools.fock.basis import FockCoefficients, get_basis
from anisotrap.tools.symplectic.params import DerivedParams, TrapParams, derive_parameters
from utils.logger import get_logger

logger = get_logger(__name__)

NORM_TOL = 1e-8


class ReducedParams(BaseModel):
    """
    eps: x₁ 방향 가둠 세기
    kappa: x₂ 방향 가둠 세기 (κ = κ₁/β₂)
    g0: 축약 결합 상수 (0 이면 이차 문제)
    """

    model_config = ConfigDict(frozen=True)

    eps: float = Field(..., gt=0.0)
    kappa: float = Field(..., gt=0.0)
    g0: float = Field(..., ge=0.0)

    @property
    def ratio(self) -> float:
        """κ/ε^{1/3}"""
        return self.kappa / self.eps ** (1.0 / 3.0)

    def require_interaction(self) -> None:
        if self.g0 <= 0.0:
            raise InvalidParameterError(f"g₀={self.g0} 는 양수여야 합니다")


class Regime(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: Literal["Weak", "Intermediate", "Strong"]
    ratio: float

    @property
    def is_weak(self) -> bool:
        return self.tag == WEAK

    @property
    def is_strong(self) -> bool:
        return self.tag == STRONG


class EnergyBreakdown(BaseModel):
    model_config = ConfigDict(frozen=True)

    pot_x1: float
    pot_x2: float
    quartic: float
    total: float

    @model_validator(mode="after")
    def check_parts(self):
        parts = self.pot_x1 + self.pot_x2 + self.quartic
        if abs(parts - self.total) > 1e-12 * max(1.0, abs(self.total)):
            raise ValueError(f"total={self.total} 가 항들의 합 {parts} 와 다릅니다")
        if min(self.pot_x1, self.pot_x2, self.quartic) < 0.0:
            raise ValueError("에너지 항은 음수일 수 없습니다")
        return self

    @classmethod
    def from_parts(cls, pot_x1: float, pot_x2: float, quartic: float) -> "EnergyBreakdown":
        return cls(pot_x1=pot_x1, pot_x2=pot_x2, quartic=quartic, total=pot_x1 + pot_x2 + quartic)


def reduced_params(p: TrapParams) -> ReducedParams:
    """
    (ε, κ₁/β₂, g₁γ²/(4β₂)), g₁ = g(α+2ω²+ν²)/(2α)

    Raises:
        InvalidParameterError: ε = 0 (축약 에너지가 x₁ 방향으로 가두지 않음)
    """
    if p.eps <= 0.0:
        raise InvalidParameterError("ε=0 이면 축약 에너지가 x₁ 방향으로 유계가 아닙니다")
    dp = derive_parameters(p)
    return ReducedParams(eps=p.eps, kappa=dp.kappa, g0=dp.g0)


def classify_regime(rp: ReducedParams) -> Regime:
    settings = get_settings()
    ratio = rp.ratio
    if ratio < settings.regime_low:
        tag = WEAK
    elif ratio > settings.regime_high:
        tag = STRONG
    else:
        tag = INTERMEDIATE
    return Regime(tag=tag, ratio=ratio)


def _check_norm(norm: float) -> None:
    if abs(norm - 1.0) > NORM_TOL:
        raise GridError(f"에너지는 정규화된 입력에만 정의됩니다: ‖u‖={norm:.12g}")


def energy_from_moments(m1: float, m2: float, quartic_integral: float, rp: ReducedParams) -> EnergyBreakdown:
    """∫x₁²|u|², ∫x₂²|u|², ∫|u|⁴ 로부터 세 항을 조립한다"""
    return EnergyBreakdown.from_parts(
        0.5 * rp.eps**2 * m1, 0.5 * rp.kappa**2 * m2, 0.5 * rp.g0 * quartic_integral
    )


def energy_E(
    u: Union[FockCoefficients, ComplexField], rp: ReducedParams, grid: Optional[Grid2D] = None
) -> EnergyBreakdown:
    """
    계수 입력이면 이차 항은 기저 모멘트 행렬로, 사차 항은 격자 합성으로 계산한다.
    필드 입력이면 세 항 모두 격자 구적이다.

    Raises:
        GridError: ‖u‖ ≠ 1 (1e-8), 또는 계수 입력에 격자가 없는 경우
    """
    if isinstance(u, FockCoefficients):
        if grid is None:
            raise GridError("계수 입력의 사차 항을 계산하려면 격자가 필요합니다")
        _check_norm(u.norm())
        basis = get_basis(u.N, grid, u.squeeze)
        X1, X2 = basis.moment_matrices
        m1 = float(np.real(np.conj(u.c) @ X1 @ u.c))
        m2 = float(np.real(np.conj(u.c) @ X2 @ u.c))
        field = basis.synthesize(u)
    else:
        _check_norm(u.norm())
        field = u
        X1, X2 = field.grid.mesh()
        m1 = float(np.sum(X1**2 * field.density) * field.grid.weight)
        m2 = float(np.sum(X2**2 * field.density) * field.grid.weight)
    quartic = float(np.sum(field.density**2) * field.grid.weight)
    return energy_from_moments(m1, m2, quartic, rp)


def _gp_coefficients(dp: DerivedParams):
    """E_GP = scale·E + offset 의 (scale, offset)"""
    p = dp.trap
    high = dp.alpha + 2 * p.omega**2 + p.nu**2
    low = dp.alpha - 2 * p.omega**2 + p.nu**2
    scale = (2 * dp.alpha / high) * (2 * dp.beta2 / dp.gamma_par)
    # μ₁/(β₁β₂) = low/(2ωβ₂): ε → 0 에서도 유한
    offset = dp.mu2 / (4 * math.pi) - (dp.mu1 * dp.beta1 * dp.beta2 + low / (2 * p.omega * dp.beta2)) / (8 * math.pi)
    return scale, offset


def gp_energy_map(E_value: float, dp: DerivedParams) -> float:
    """E(v) → ℰ_LLL = (2β₂/γ)E(v) → E_GP = 2α/(α+2ω²+ν²)·ℰ_LLL + μ₂/4π − (μ₁/8π)(β₁β₂ + 1/(β₁β₂))"""
    scale, offset = _gp_coefficients(dp)
    return scale * E_value + offset


def gp_energy_inverse(E_gp: float, dp: DerivedParams) -> float:
    scale, offset = _gp_coefficients(dp)
    return (E_gp - offset) / scale
