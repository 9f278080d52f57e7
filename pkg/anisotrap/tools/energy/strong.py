"""
강한 비등방 영역 (κ ≫ ε^{1/3})

I(ε, κ) = κ²/8π + ε^{2/3} J + o(ε^{2/3}),
J = inf{∫½t²p² + (g₀/2)∫p⁴ : ∫p² = 1} = (3/10)(3g₀/2)^{2/3}
최소자 p(t)² = (3/4R)(1 − t²/R²)₊, R = (3g₀/2)^{1/3}
"""

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy.integrate import quad

from anisotrap.core.errors import InvalidParameterError, RegimeError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.core.settings import get_settings
from utils.logger import get_logger

from .models import ReducedParams, classify_regime

logger = get_logger(__name__)


@dataclass(frozen=True)
class StrongLimit:
    g0: float
    R: float
    J: float

    @property
    def multiplier(self) -> float:
        """지지 집합 위에서 t²/2 + g₀p² = λ, λ = R²/2"""
        return 0.5 * self.R**2

    def density(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return 3.0 / (4.0 * self.R) * np.clip(1.0 - (t / self.R) ** 2, 0.0, None)

    def amplitude(self, t) -> np.ndarray:
        return np.sqrt(self.density(t))


def energy_1d(p: np.ndarray, t: np.ndarray, g0: float) -> float:
    """균일 격자 t 위에서 ∫½t²p² + (g₀/2)∫p⁴"""
    dt = t[1] - t[0]
    return float(np.sum(0.5 * t**2 * p**2 + 0.5 * g0 * p**4) * dt)


def strong_limit_1d(g0: float) -> StrongLimit:
    """
    Raises:
        InvalidParameterError: g₀ ≤ 0
    """
    if g0 <= 0.0:
        raise InvalidParameterError(f"1차원 문제는 g₀ > 0 이어야 합니다: {g0}")
    R = (1.5 * g0) ** (1.0 / 3.0)
    J = 0.3 * (1.5 * g0) ** (2.0 / 3.0)
    limit = StrongLimit(g0=g0, R=R, J=J)

    kinetic, _ = quad(lambda t: 0.5 * t**2 * limit.density(t), -R, R, epsabs=1e-14, epsrel=1e-13)
    interaction, _ = quad(lambda t: 0.5 * g0 * limit.density(t) ** 2, -R, R, epsabs=1e-14, epsrel=1e-13)
    if abs(kinetic + interaction - J) > 1e-10 * max(1.0, J):
        logger.warning(f"J 닫힌 형태 {J:.12g} 와 구적 {kinetic + interaction:.12g} 가 다릅니다")
    return limit


def strong_asymptote(rp: ReducedParams, require_strong: bool = True) -> Tuple[float, float]:
    """
    Returns:
        (κ²/8π + ε^{2/3}J(g₀), κ²/8π)  예측값과 엄밀한 하한

    Raises:
        RegimeError: 강한 영역이 아닌 경우 (require_strong=True)
    """
    regime = classify_regime(rp)
    if require_strong and not regime.is_strong:
        raise RegimeError(f"강한 영역 점근식은 {regime.tag} 영역(κ/ε^(1/3)={regime.ratio:.3f})에 쓰지 않습니다")
    floor = rp.kappa**2 / (8 * math.pi)
    return floor + rp.eps ** (2.0 / 3.0) * strong_limit_1d(rp.g0).J, floor


def strong_test_function(rp: ReducedParams, grid: Grid2D) -> ComplexField:
    """
    u₁ = Π₀(ρ(x₁)δ(x₂))/‖·‖, ρ(t) = ε^{1/3}p(ε^{2/3}t)
       ∝ e^{−πx₂²/2} ∫ e^{−π(x₁−y)²/2 + iπyx₂} ρ(y) dy
    y 적분은 격자의 x₁ 점 위 중점 규칙
    """
    limit = strong_limit_1d(rp.g0)
    y = grid.x1
    rho = rp.eps ** (1.0 / 3.0) * limit.amplitude(rp.eps ** (2.0 / 3.0) * y)
    kernel = np.exp(-0.5 * np.pi * (grid.x1[:, None] - y[None, :]) ** 2)
    phase = rho[:, None] * np.exp(1j * np.pi * y[:, None] * grid.x2[None, :])
    values = (kernel @ phase) * grid.h1 * np.exp(-0.5 * np.pi * grid.x2**2)[None, :]
    return ComplexField(values, grid, {"kind": "strong_test"}).normalized()


def _modulus_gradient(field: ComplexField) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mod = np.abs(field.values)
    g1, g2 = np.gradient(mod, field.grid.h1, field.grid.h2)
    keep = mod >= get_settings().zero_floor * mod.max()
    return g1 * keep, g2 * keep, mod


def energy_decomposition(field: ComplexField, rp: ReducedParams) -> Dict[str, float]:
    """
    E = −κ²/8π + (κ²/2)(∫|∂₂|u||²/4π² + ∫x₂²|u|²) + (κ²/8π²)∫|∂₁|u||² + (ε²/2)∫x₁²|u|² + (g₀/2)∫|u|⁴

    Carlen 항등식 ∫|∇|u||² = π 로 첫 세 항의 합이 (κ²/2)∫x₂²|u|² 가 된다.
    둘째 항은 조화 진동자 바닥값으로 κ²/4π 이상이므로 E ≥ κ²/8π.
    """
    w = field.grid.weight
    g1, g2, mod = _modulus_gradient(field)
    X1, X2 = field.grid.mesh()
    density = mod**2
    terms = {
        "offset": -(rp.kappa**2) / (8 * math.pi),
        "transverse": 0.5
        * rp.kappa**2
        * (np.sum(g2**2) * w / (4 * math.pi**2) + np.sum(X2**2 * density) * w),
        "longitudinal_kinetic": rp.kappa**2 / (8 * math.pi**2) * np.sum(g1**2) * w,
        "pot_x1": 0.5 * rp.eps**2 * np.sum(X1**2 * density) * w,
        "quartic": 0.5 * rp.g0 * np.sum(density**2) * w,
    }
    terms = {k: float(v) for k, v in terms.items()}
    terms["total"] = sum(terms.values())
    return terms


def strong_profile_error(field: ComplexField, rp: ReducedParams) -> float:
    """
    재척도한 |u| 와 극한 프로파일의 상대 L² 거리
    ε^{−1/3}|u(tε^{−2/3}, x₂)| ↔ 2^{1/4}e^{−πx₂²}p(t)
    (격자 점 위에서 ε^{1/3}2^{1/4}e^{−πx₂²}p(ε^{2/3}x₁) 와 비교)
    """
    limit = strong_limit_1d(rp.g0)
    X1, X2 = field.grid.mesh()
    target = rp.eps ** (1.0 / 3.0) * 2**0.25 * np.exp(-np.pi * X2**2) * limit.amplitude(rp.eps ** (2.0 / 3.0) * X1)
    return float(np.linalg.norm(np.abs(field.values) - target) / np.linalg.norm(target))
