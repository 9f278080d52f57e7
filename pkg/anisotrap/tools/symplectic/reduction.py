"""
트랩 이차형식 q 의 심플렉틱 축약
- 이차형식 Q 생성, Williamson 진동수, 축약 사상 χ 와 생성함수 분해 (A, B, C)
- 네 개의 일차형식 제곱합 표현과 Poisson 괄호
좌표 순서는 (x₁, x₂, ξ₁, ξ₂) 이다.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from anisotrap.core.errors import IndefiniteFormError, InvalidParameterError, SingularMapError
from anisotrap.core.settings import get_settings
from utils.logger import get_logger

from .params import DerivedParams, TrapParams, derive_parameters

logger = get_logger(__name__)

SIGMA = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])


@dataclass(frozen=True)
class QuadraticForm4:
    Q: np.ndarray
    trap: Optional[TrapParams] = None

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        if Q.shape != (4, 4):
            raise InvalidParameterError(f"Q 는 4x4 여야 합니다: {Q.shape}")
        if np.max(np.abs(Q - Q.T)) > 1e-14:
            raise InvalidParameterError("Q 가 대칭이 아닙니다")
        object.__setattr__(self, "Q", Q)

    def value(self, X: np.ndarray) -> np.ndarray:
        """q(X) = Xᵀ Q X, X 는 (..., 4)"""
        X = np.asarray(X, dtype=float)
        return np.einsum("...i,ij,...j->...", X, self.Q, X)

    def is_positive_definite(self) -> bool:
        return bool(np.min(np.linalg.eigvalsh(self.Q)) > get_settings().matrix_tol)

    def rank(self, tol: Optional[float] = None) -> int:
        tol = get_settings().matrix_tol if tol is None else tol
        return int(np.linalg.matrix_rank(self.Q, tol=tol))

    @property
    def fundamental_matrix(self) -> np.ndarray:
        return SIGMA @ self.Q


def build_trap_quadratic_form(p: TrapParams) -> QuadraticForm4:
    """
    q(x, ξ) = (1−ν²)x₁² + (1+ν²)x₂² + ξ₁² + ξ₂² + 2ω(x₂ξ₁ − x₁ξ₂)
    """
    w, n2 = p.omega, p.nu**2
    Q = np.array(
        [
            [1.0 - n2, 0.0, 0.0, -w],
            [0.0, 1.0 + n2, w, 0.0],
            [0.0, w, 1.0, 0.0],
            [-w, 0.0, 0.0, 1.0],
        ]
    )
    return QuadraticForm4(Q, trap=p)


def closed_form_frequencies(p: TrapParams) -> Tuple[float, float]:
    """
    μ₂² = 1+ω²+α, μ₁² = 1+ω²−α = (2ν²ε²+ε⁴)/μ₂²
    ω=1, ν=ε=0 처럼 λ₁=0 인 퇴화 형식에서도 정의된다.
    """
    w2, n2, e2 = p.omega**2, p.nu**2, p.eps**2
    alpha = np.sqrt(n2 * n2 + 4 * w2)
    mu2_sq = 1 + w2 + alpha
    mu1_sq = max((2 * n2 * e2 + e2 * e2) / mu2_sq, 0.0)
    return float(np.sqrt(mu1_sq)), float(np.sqrt(mu2_sq))


def eigen_frequencies(Q: np.ndarray, tol: Optional[float] = None) -> Tuple[float, float]:
    """
    F = σQ 의 고유값 ±iμ 로부터 (μ₁, μ₂) 를 구한다.
    λ² 로 다루면 ε=0, ν>0 의 Jordan 블록도 안정적으로 0 이 된다.
    """
    tol = get_settings().matrix_tol if tol is None else tol
    F = SIGMA @ np.asarray(Q, dtype=float)
    lam_sq = np.linalg.eigvals(F) ** 2
    scale = max(1.0, float(np.max(np.abs(lam_sq))))
    if np.max(np.abs(lam_sq.imag)) > tol * scale or np.max(lam_sq.real) > tol * scale:
        raise IndefiniteFormError(
            f"σQ 의 고유값이 허수축을 벗어났습니다 (λ² = {np.round(lam_sq, 12)})"
        )
    mus = np.sort(np.sqrt(np.maximum(-lam_sq.real, 0.0)))
    return float(0.5 * (mus[0] + mus[1])), float(0.5 * (mus[2] + mus[3]))


def williamson_frequencies(form: QuadraticForm4, tol: Optional[float] = None) -> Tuple[float, float]:
    """
    Williamson 진동수 0 ≤ μ₁ ≤ μ₂

    Args:
        form: 이차형식 (트랩 형식이면 trap 필드가 채워져 있음)
        tol: 두 계산 경로 일치 허용 오차 (제곱 기준)

    Returns:
        (mu1, mu2). 트랩 형식이면 닫힌 형태 값을 반환한다.
    """
    tol = get_settings().matrix_tol if tol is None else tol
    mu1_e, mu2_e = eigen_frequencies(form.Q, tol=tol)
    if form.trap is None:
        return mu1_e, mu2_e

    mu1_c, mu2_c = closed_form_frequencies(form.trap)
    if abs(mu1_c**2 - mu1_e**2) > tol or abs(mu2_c**2 - mu2_e**2) > tol:
        raise InvalidParameterError(
            f"닫힌 형태 ({mu1_c}, {mu2_c}) 와 고유값 경로 ({mu1_e}, {mu2_e}) 가 불일치합니다"
        )
    return mu1_c, mu2_c


@dataclass(frozen=True)
class SymplecticMap:
    chi: np.ndarray
    chi_inv: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @staticmethod
    def from_generating(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
        """
        생성함수 S(x,η) = ½(⟨Ax,x⟩ + 2⟨Bx,η⟩ + ⟨Cη,η⟩) 가 정의하는 사상
        (∂S/∂η, η) ↦ (x, ∂S/∂x)
        """
        B_inv = np.linalg.inv(B)
        return np.block([[B_inv, -B_inv @ C], [A @ B_inv, B.T - A @ B_inv @ C]])

    def symplectic_residual(self) -> float:
        return float(np.max(np.abs(self.chi.T @ SIGMA @ self.chi - SIGMA)))

    def inverse_residual(self) -> float:
        return float(np.max(np.abs(self.chi @ self.chi_inv - np.eye(4))))

    def product_residual(self) -> float:
        return float(np.max(np.abs(self.chi - self.from_generating(self.A, self.B, self.C))))

    def diagonal_residual(self, form: QuadraticForm4, mu1: float, mu2: float) -> float:
        target = np.diag([mu1**2, mu2**2, 1.0, 1.0])
        return float(np.max(np.abs(self.chi.T @ form.Q @ self.chi - target)))

    def generating_residual(self, samples: np.ndarray) -> float:
        """
        임의의 (x, η) 표본에서 χ(Bx+Cη, η) = (x, Ax+Bᵀη) 잔차
        """
        x, eta = samples[:, :2], samples[:, 2:]
        y = x @ self.B.T + eta @ self.C.T
        xi = x @ self.A.T + eta @ self.B
        image = np.hstack([y, eta]) @ self.chi.T
        return float(np.max(np.abs(image - np.hstack([x, xi]))))


def build_reduction_map(dp: DerivedParams, tol: Optional[float] = None) -> SymplecticMap:
    """
    χᵀ Q χ = diag(μ₁², μ₂², 1, 1) 를 만족하는 축약 사상 χ 와 (A, B, C)

    Raises:
        SingularMapError: λ₁λ₂ 가 수치적으로 0 이거나 μ₁ = 0 (ε = 0)
    """
    tol = get_settings().matrix_tol if tol is None else tol
    l1, l2, c, d = dp.lambda1, dp.lambda2, dp.c, dp.d
    if l1 * l2 < tol:
        raise SingularMapError(f"λ₁λ₂ = {l1 * l2:.3e}: B 가 특이합니다")
    if dp.mu1 <= 0.0:
        raise SingularMapError("μ₁ = 0 (ε = 0) 에서는 축약 사상을 만들 수 없습니다")

    a = d / (l1 * l2) - c * d
    A = np.array([[0.0, a], [a, 0.0]])
    B = np.diag([1.0 / l1, 1.0 / l2])
    C = np.array([[0.0, 1.0 / d], [1.0 / d, 0.0]])

    chi = np.array(
        [
            [l1, 0.0, 0.0, -l1 / d],
            [0.0, l2, -l2 / d, 0.0],
            [0.0, d / l1 - l2 * c * d, c * l2, 0.0],
            [d / l2 - l1 * c * d, 0.0, 0.0, c * l1],
        ]
    )
    chi_inv = np.array(
        [
            [c * l2, 0.0, 0.0, l2 / d],
            [0.0, c * l1, l1 / d, 0.0],
            [0.0, -d / l2 + l1 * c * d, l1, 0.0],
            [-d / l1 + l2 * c * d, 0.0, 0.0, l2],
        ]
    )
    return SymplecticMap(chi=chi, chi_inv=chi_inv, A=A, B=B, C=C)


def sum_of_squares_forms(dp: DerivedParams) -> List[Tuple[float, np.ndarray]]:
    """
    q = Σ c_j ℓ_j² 를 만드는 (계수, 일차형식 벡터) 네 쌍

    ℓ₁ = ξ₁ − a x₂, ℓ₂ = ξ₂ + b x₁, ℓ₃ = ξ₁ + b x₂, ℓ₄ = ξ₂ − a x₁
    (a = (α−ν²)/2ω, b = (α+ν²)/2ω)
    """
    p = dp.trap
    w, n2, e2 = p.omega, p.nu**2, p.eps**2
    alpha = dp.alpha
    a = (alpha - n2) / (2 * w)
    b = (alpha + n2) / (2 * w)
    return [
        ((alpha - 2 * w * w + n2) / (2 * alpha), np.array([0.0, -a, 1.0, 0.0])),
        ((alpha + 2 * w * w - n2) * e2 / (2 * alpha * dp.mu2**2), np.array([b, 0.0, 0.0, 1.0])),
        (2 * w * w * dp.mu2**2 / (alpha * (alpha + 2 * w * w + n2)), np.array([0.0, b, 1.0, 0.0])),
        (dp.lambda2**2, np.array([-a, 0.0, 0.0, 1.0])),
    ]


def poisson_bracket(u: np.ndarray, v: np.ndarray) -> float:
    """일차형식 {u, v} = ∂_ξu·∂_xv − ∂_xu·∂_ξv"""
    return float(u[2:] @ v[:2] - u[:2] @ v[2:])


def oscillator_levels(mu1: float, mu2: float, n_max: int = 4) -> np.ndarray:
    """
    μ₁²y₁² + μ₂²y₂² + D₁² + D₂² 의 스펙트럼 하단 {Σ(2n_j+1)μ_j/(2π)} (정렬됨)
    """
    n = np.arange(n_max + 1)
    levels = ((2 * n[:, None] + 1) * mu1 + (2 * n[None, :] + 1) * mu2) / (2 * np.pi)
    return np.sort(levels.ravel())


def gaussian_ground_state(mu: float, y: np.ndarray) -> np.ndarray:
    """μ²y² + D² 의 정규화된 바닥 상태 2^{1/4}μ^{1/4}e^{−πμy²}"""
    return 2.0**0.25 * mu**0.25 * np.exp(-np.pi * mu * np.asarray(y) ** 2)


def reduction_report(p: TrapParams, samples: int = 1000, seed: int = 0) -> Dict[str, float]:
    """
    축약 사상의 잔차 보고서 (reduce 서브커맨드용)
    """
    rng = np.random.default_rng(seed)
    form = build_trap_quadratic_form(p)
    mu1, mu2 = williamson_frequencies(form)
    dp = derive_parameters(p)
    chi = build_reduction_map(dp)

    X = rng.standard_normal((samples, 4))
    q = form.value(X)
    sos = sum(coef * (X @ vec) ** 2 for coef, vec in sum_of_squares_forms(dp))
    report = {
        "mu1": mu1,
        "mu2": mu2,
        "symplectic": chi.symplectic_residual(),
        "diagonal": chi.diagonal_residual(form, mu1, mu2),
        "inverse": chi.inverse_residual(),
        "product": chi.product_residual(),
        "generating": chi.generating_residual(X),
        "sum_of_squares": float(np.max(np.abs(sos - q) / np.maximum(np.abs(q), 1e-300))),
    }
    logger.info(f"축약 잔차: { {k: f'{v:.2e}' for k, v in report.items()} }")
    return report
