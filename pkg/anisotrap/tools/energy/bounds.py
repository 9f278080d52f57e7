"""
약한 비등방 영역의 에너지 괄호

- Thomas–Fermi (역포물선) 최소자: 정칙성 제약 없이 E 를 최소화, 하계를 준다
- 세타 격자 시험함수 v = Π₀(u_τ ρ): 상계를 준다
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from anisotrap.core.constant import BASIS_COVERAGE, KERNEL_REACH, WEAK_UPPER_SLACK
from anisotrap.core.errors import RegimeError, ResolutionError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.tools.fock.basis import FockCoefficients
from anisotrap.tools.fock.projector import project_lll
from anisotrap.tools.theta.lattice import LatticeTau, gamma_tau, u_tau_field
from utils.logger import get_logger

from .models import EnergyBreakdown, ReducedParams, classify_regime, energy_E
from .strong import strong_limit_1d

logger = get_logger(__name__)


@dataclass(frozen=True)
class ThomasFermi:
    """
    |u|² = (2/(πR₁R₂))(1 − x₁²/R₁² − x₂²/R₂²)₊
    R₁ = (4g₀κ/(πε³))^{1/4}, R₂ = (4g₀ε/(πκ³))^{1/4}
    """

    R1: float
    R2: float
    energy: float

    def density(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        return 2.0 / (math.pi * self.R1 * self.R2) * np.clip(1.0 - (x1 / self.R1) ** 2 - (x2 / self.R2) ** 2, 0.0, None)

    def field(self, grid: Grid2D) -> ComplexField:
        X1, X2 = grid.mesh()
        return ComplexField(np.sqrt(self.density(X1, X2)), grid, {"kind": "thomas_fermi"})

    def contains(self, x1, x2, margin: float = 1.0):
        return (x1 / (margin * self.R1)) ** 2 + (x2 / (margin * self.R2)) ** 2 <= 1.0


def thomas_fermi(rp: ReducedParams) -> ThomasFermi:
    rp.require_interaction()
    R1 = (4 * rp.g0 * rp.kappa / (math.pi * rp.eps**3)) ** 0.25
    R2 = (4 * rp.g0 * rp.eps / (math.pi * rp.kappa**3)) ** 0.25
    tf = ThomasFermi(R1=R1, R2=R2, energy=tf_lower_bound(rp))
    if R2 < 1.0:
        logger.warning(f"TF 반지름 R₂={R2:.3f} < 1: 강한 영역에서는 TF 근사가 맞지 않습니다")
    return tf


def tf_lower_bound(rp: ReducedParams) -> float:
    """E_TF = ⅔√(g₀εκ/π) (TF 프로파일의 구적과 일치하는 상수)"""
    rp.require_interaction()
    return (2.0 / 3.0) * math.sqrt(rp.g0 * rp.eps * rp.kappa / math.pi)


def weak_upper_bound(rp: ReducedParams, tau: Optional[LatticeTau] = None) -> float:
    """주요 차수 상계 ⅔√(g₀γ(τ)εκ/π) (기본 τ 는 육각 격자)"""
    tau = LatticeTau.hexagonal() if tau is None else tau
    return tf_lower_bound(rp) * math.sqrt(gamma_tau(tau))


def weak_bracket(rp: ReducedParams, slack: float = WEAK_UPPER_SLACK) -> Tuple[float, float]:
    """[⅔√(g₀εκ/π), ⅔√(g₀bεκ/π)·(1+slack)]"""
    return tf_lower_bound(rp), weak_upper_bound(rp) * (1.0 + slack)


def lll_squeeze(rp: ReducedParams, N: int) -> float:
    """
    응축체의 x₁ 방향 길이에 맞춘 압축 기저 파라미터 λ ∈ (0, 1]

    ψ_0..ψ_N 은 반축 √(N/π)·(λ^{−1/2}, λ^{1/2}) 의 타원을 덮는다.
    약한/중간 영역: λ = R₂/R₁ (타원 축비 = TF 축비)
    강한 영역: x₁ 반축이 BASIS_COVERAGE·L (L = R ε^{−2/3}) 이 되도록 λ = N/(π(1.2L)²)
    """
    if classify_regime(rp).is_strong:
        L = strong_limit_1d(rp.g0).R / rp.eps ** (2.0 / 3.0)
        return float(min(1.0, N / (math.pi * (BASIS_COVERAGE * L) ** 2)))
    tf = thomas_fermi(rp)
    return float(min(1.0, tf.R2 / tf.R1))


def theta_profile(gamma: float, R1: float, R2: float, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """
    ρ(x) = (1/√(R₁R₂)) p(x₁/R₁, x₂/R₂),
    p(y) = √(2/(π√γ)) (1 − |y|²/√γ)₊^{1/2}
    """
    s = math.sqrt(gamma)
    y2 = (x1 / R1) ** 2 + (x2 / R2) ** 2
    p = math.sqrt(2.0 / (math.pi * s)) * np.sqrt(np.clip(1.0 - y2 / s, 0.0, None))
    return p / math.sqrt(R1 * R2)


def weak_ansatz(
    rp: ReducedParams,
    tau: LatticeTau,
    grid: Grid2D,
    N: int,
    squeeze: Optional[float] = None,
) -> Tuple[FockCoefficients, EnergyBreakdown]:
    """
    v = Π₀(u_τ ρ)/‖Π₀(u_τ ρ)‖ 의 계수와 에너지

    Raises:
        RegimeError: 강한 영역
        ResolutionError: 격자가 ρ 의 지지 집합과 커널 도달 거리를 덮지 못하는 경우
    """
    regime = classify_regime(rp)
    if regime.is_strong:
        raise RegimeError(f"세타 격자 시험함수는 강한 영역(κ/ε^(1/3)={regime.ratio:.3f})에 쓰지 않습니다")

    tf = thomas_fermi(rp)
    gamma = gamma_tau(tau)
    stretch = gamma**0.25
    reach1, reach2 = stretch * tf.R1 + KERNEL_REACH, stretch * tf.R2 + KERNEL_REACH
    if min(-grid.x1_min, grid.x1_max) < reach1 or min(-grid.x2_min, grid.x2_max) < reach2:
        raise ResolutionError(
            f"격자가 시험함수 지지 집합을 덮지 못합니다: 필요 ({reach1:.2f}, {reach2:.2f})"
        )
    squeeze = lll_squeeze(rp, N) if squeeze is None else squeeze

    X1, X2 = grid.mesh()
    rho = theta_profile(gamma, tf.R1, tf.R2, X1, X2)
    trial = u_tau_field(tau, grid)
    v = project_lll(trial.with_values(rho * trial.values), N, squeeze).normalized()
    energy = energy_E(v, rp, grid)

    leading = tf_lower_bound(rp) * math.sqrt(gamma)
    if energy.total > leading * (1.0 + WEAK_UPPER_SLACK):
        logger.warning(
            f"세타 시험함수 에너지 {energy.total:.6g} 가 상계 {leading:.6g}·(1+{WEAK_UPPER_SLACK}) 를 넘습니다"
        )
    logger.info(f"세타 시험함수: τ={tau.tau:.4f}, γ={gamma:.6f}, E={energy.total:.8g}, 주요 차수={leading:.8g}")
    return v, energy
