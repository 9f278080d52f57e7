"""
트랩 입력 파라미터와 파생 파라미터
(ω, ν, ε, g) 로부터 α, μ, β, γ, λ, c, d, κ, g₀ 등 전체 파라미터를 닫힌 형태로 계산한다.
"""

import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from anisotrap.core.errors import DegenerateParameterError, InvalidParameterError
from anisotrap.core.settings import get_settings
from utils.logger import get_logger

logger = get_logger(__name__)


class TrapParams(BaseModel):
    """
    omega: 회전 비율 Ω/ω⊥ ∈ (0, 1]
    nu: 비등방성 ≥ 0
    eps: 잔차 ≥ 0, ω²+ν²+ε²=1
    g: 결합 상수 > 0
    """

    model_config = ConfigDict(frozen=True)

    omega: float = Field(..., gt=0.0, le=1.0, description="회전 비율")
    nu: float = Field(..., ge=0.0, description="비등방성")
    eps: float = Field(..., ge=0.0, description="잔차 파라미터")
    g: float = Field(default=1.0, gt=0.0, description="결합 상수")

    @model_validator(mode="after")
    def check_constraint(self):
        settings = get_settings()
        total = self.omega**2 + self.nu**2 + self.eps**2
        if abs(total - 1.0) > settings.constraint_tol:
            raise ValueError(
                f"ω²+ν²+ε² = {total:.15g} ≠ 1 (허용 오차 {settings.constraint_tol:g})"
            )
        if self.omega < settings.omega_floor:
            raise ValueError(f"ω={self.omega:g} 가 하한 {settings.omega_floor:g} 보다 작습니다")
        return self

    @property
    def eps_sq(self) -> float:
        return self.eps**2

    @classmethod
    def from_inputs(
        cls,
        omega: Optional[float] = None,
        nu: Optional[float] = None,
        eps: Optional[float] = None,
        g: float = 1.0,
        eps_sq: Optional[float] = None,
    ) -> "TrapParams":
        """
        (ω, ν, ε) 중 두 개를 받아 나머지를 제약식으로부터 구한다.
        세 개를 모두 주면 1e-9 이내로 일관적이어야 한다.

        Raises:
            InvalidParameterError: 제약 위반, 과결정 불일치, ω²+ν²>1 등
        """
        settings = get_settings()
        if eps_sq is not None:
            if eps is not None and abs(eps**2 - eps_sq) > settings.overdetermined_tol:
                raise InvalidParameterError(f"eps={eps} 와 eps_sq={eps_sq} 가 일치하지 않습니다")
            if eps_sq < 0:
                raise InvalidParameterError(f"eps_sq={eps_sq} 는 음수일 수 없습니다")
            eps = math.sqrt(eps_sq)

        given = {k: v for k, v in (("omega", omega), ("nu", nu), ("eps", eps)) if v is not None}
        if len(given) < 2:
            raise InvalidParameterError(f"ω, ν, ε 중 두 개 이상이 필요합니다 (입력: {sorted(given)})")

        if len(given) == 3:
            total = omega**2 + nu**2 + eps**2
            if abs(total - 1.0) > settings.overdetermined_tol:
                raise InvalidParameterError(
                    f"과결정 입력이 제약과 불일치: ω²+ν²+ε² = {total:.12g}"
                )
            # 작은 반올림 오차는 ε 쪽으로 흡수
            eps = None

        if omega is not None and nu is not None and eps is None:
            rest = 1.0 - omega**2 - nu**2
            if rest < -settings.overdetermined_tol:
                raise InvalidParameterError(
                    f"ω²+ν² = {omega**2 + nu**2:.6g} > 1: 이차형식 q 가 양정치가 아니며 q^w 는 아래로 유계가 아닙니다"
                )
            eps = math.sqrt(max(rest, 0.0))
        elif omega is not None and eps is not None and nu is None:
            rest = 1.0 - omega**2 - eps**2
            if rest < -settings.overdetermined_tol:
                raise InvalidParameterError(f"ω²+ε² > 1: ν² = {rest:.6g} < 0")
            nu = math.sqrt(max(rest, 0.0))
        elif nu is not None and eps is not None and omega is None:
            rest = 1.0 - nu**2 - eps**2
            if rest <= 0.0:
                raise InvalidParameterError(f"ν²+ε² ≥ 1: ω² = {rest:.6g} 이 양수가 아닙니다")
            omega = math.sqrt(rest)

        try:
            return cls(omega=omega, nu=nu, eps=eps, g=g)
        except ValidationError as e:
            logger.error(f"트랩 파라미터 검증 실패: {e}")
            raise InvalidParameterError(str(e)) from e


class DerivedParams(BaseModel):
    """
    파생 파라미터 집합 (모두 무차원 실수)
    """

    model_config = ConfigDict(frozen=True)

    alpha: float
    mu1: float
    mu2: float
    beta1: float
    beta2: float
    gamma_par: float
    lambda1: float
    lambda2: float
    c: float
    d: float
    kappa1: float
    kappa: float
    g0: float
    g1: float
    trap: TrapParams

    @model_validator(mode="after")
    def check_invariants(self):
        p = self.trap
        w2, n2, e2 = p.omega**2, p.nu**2, p.eps**2
        checks = {
            "alpha": (self.alpha, math.sqrt(n2**2 + 4 * w2)),
            "mu2²": (self.mu2**2, 1 + w2 + self.alpha),
            "mu1²mu2²": (self.mu1**2 * self.mu2**2, 2 * n2 * e2 + e2**2),
            "λ₁²+λ₂²": (self.lambda1**2 + self.lambda2**2, 1 + n2 / self.alpha),
            "c·d": (self.c * self.d, (self.alpha + n2) / (2 * p.omega)),
        }
        for name, (got, want) in checks.items():
            if abs(got - want) > 1e-12 * max(1.0, abs(want)):
                raise ValueError(f"파생 파라미터 불변식 위반 ({name}): {got!r} != {want!r}")
        if self.kappa1**2 < (2 * n2 + e2) * (1 - 1e-12):
            raise ValueError("κ₁² ≥ 2ν²+ε² 위반")
        if not (1.0 - 1e-12 <= self.mu2**2 <= 4.0 + 1e-12):
            raise ValueError(f"μ₂²={self.mu2**2} ∉ [1, 4]")
        return self

    @property
    def ratio(self) -> float:
        return self.kappa / self.trap.eps ** (1.0 / 3.0) if self.trap.eps > 0 else math.inf


def derive_parameters(p: TrapParams) -> DerivedParams:
    """
    트랩 파라미터로부터 파생 파라미터를 닫힌 형태로 계산한다.
    κ₁² 분모는 (α−ν²+2ω²) 를 사용한다.

    Raises:
        DegenerateParameterError: α−2ω²+ν² ≤ 0 (ω=1, ν=ε=0 에서 λ₁=0)
    """
    w, nu, eps, g = p.omega, p.nu, p.eps, p.g
    w2, n2, e2 = w * w, nu * nu, eps * eps

    alpha = math.sqrt(n2 * n2 + 4 * w2)
    low = alpha - 2 * w2 + n2
    high = alpha + 2 * w2 + n2
    if low <= 0.0:
        raise DegenerateParameterError(f"α−2ω²+ν² = {low:.3e} ≤ 0: λ₁=0 이므로 축약 사상을 만들 수 없습니다")

    mu2_sq = 1 + w2 + alpha
    # μ₁² = 1+ω²−α 는 ε→0 에서 상쇄가 크므로 곱 형태로 계산
    mu1_sq = (2 * n2 * e2 + e2 * e2) / mu2_sq
    mu1, mu2 = math.sqrt(mu1_sq), math.sqrt(mu2_sq)

    beta1 = 2 * w * mu1 / low
    beta2 = 2 * w * mu2 / high
    gamma_par = 2 * alpha / w
    lambda1 = math.sqrt(low / (2 * alpha))
    lambda2 = math.sqrt(high / (2 * alpha))
    d = (alpha / w) * lambda1 * lambda2
    c = (lambda1**2 + lambda2**2) / (2 * lambda1 * lambda2)

    kappa1 = math.sqrt(high * (2 * n2 + e2) / (alpha - n2 + 2 * w2))
    g1 = g * lambda2**2
    kappa = kappa1 / beta2
    g0 = g1 * gamma_par**2 / (4 * beta2)

    return DerivedParams(
        alpha=alpha,
        mu1=mu1,
        mu2=mu2,
        beta1=beta1,
        beta2=beta2,
        gamma_par=gamma_par,
        lambda1=lambda1,
        lambda2=lambda2,
        c=c,
        d=d,
        kappa1=kappa1,
        kappa=kappa,
        g0=g0,
        g1=g1,
        trap=p,
    )
