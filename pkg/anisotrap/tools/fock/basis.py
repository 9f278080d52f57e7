"""
축약 Bargmann 공간 Λ₀ = {f(z) e^{−π|z|²/2}, f 정칙} 의 정규직교 기저

- Fock 기저 φ_k(z) = π^{k/2}/√(k!) · z^k e^{−π|z|²/2}  (‖z^k e^{−π|z|²/2}‖² = k!/π^k)
- 압축 기저 ψ_k^λ: ψ_0 = N_λ e^{πsz²/2} e^{−π|z|²/2},
  ψ_{k+1} = 2c_λ √(π/(k+1)) z ψ_k − s √(k/(k+1)) ψ_{k−1}
  s = (1−λ)/(1+λ), c_λ = √λ/(1+λ), N_λ = √2 λ^{1/4} (1+λ)^{−1/2}
  λ = 1 이면 φ_k 와 같다. λ < 1 이면 x₁ 방향으로 늘어난 응축체를 적은 차수로 표현한다.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from anisotrap.core.errors import GridError, SizeGuardError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.core.settings import get_settings
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class FockCoefficients:
    """
    u = Σ c_k ψ_k^λ 의 계수 (squeeze=1 이면 Fock 기저 φ_k)
    기저가 정규직교이므로 ‖u‖² = Σ|c_k|².
    """

    c: np.ndarray
    squeeze: float = 1.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=np.complex128))
        if c.ndim != 1:
            raise GridError(f"계수는 1차원이어야 합니다: shape={c.shape}")
        if not np.all(np.isfinite(c)):
            raise GridError("계수에 비유한 값이 있습니다")
        if not (0.0 < self.squeeze <= 1.0):
            raise GridError(f"압축 파라미터 λ={self.squeeze} 는 (0, 1] 이어야 합니다")
        object.__setattr__(self, "c", c)

    @classmethod
    def unit(cls, k: int, N: int, squeeze: float = 1.0) -> "FockCoefficients":
        c = np.zeros(N + 1, dtype=np.complex128)
        c[k] = 1.0
        return cls(c, squeeze)

    @property
    def N(self) -> int:
        return self.c.size - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.c))

    def normalized(self) -> "FockCoefficients":
        n = self.norm()
        if n == 0.0:
            raise GridError("영(0) 계수는 정규화할 수 없습니다")
        return FockCoefficients(self.c / n, self.squeeze)

    def truncation_ratio(self) -> float:
        """|c_N| / max|c_k|"""
        peak = np.max(np.abs(self.c))
        return float(np.abs(self.c[-1]) / peak) if peak > 0 else 0.0


def fock_log_norm(k: int) -> float:
    """log(π^{k/2}/√(k!))"""
    return 0.5 * (k * np.log(np.pi) - gammaln(k + 1))


def fock_basis_eval(k: int, grid: Grid2D) -> ComplexField:
    """
    φ_k 를 로그 영역에서 평가한다 (큰 k 에서도 오버플로 없음).

    Raises:
        SizeGuardError: k 가 fock_guard 를 넘는 경우
    """
    guard = get_settings().fock_guard
    if k < 0 or k > guard:
        raise SizeGuardError(f"Fock 차수 {k} 가 허용 범위 [0, {guard}] 를 벗어납니다")
    z = grid.z()
    r = np.abs(z)
    with np.errstate(divide="ignore"):
        log_mod = fock_log_norm(k) - 0.5 * np.pi * r**2 + (k * np.log(r) if k else 0.0)
    values = np.exp(log_mod) * np.exp(1j * k * np.angle(z))
    return ComplexField(values, grid, {"kind": "fock", "k": k})


def squeeze_constants(lam: float) -> Tuple[float, float, float]:
    """(s, c_λ, N_λ)"""
    s = (1.0 - lam) / (1.0 + lam)
    c_lam = np.sqrt(lam) / (1.0 + lam)
    n_lam = np.sqrt(2.0) * lam**0.25 / np.sqrt(1.0 + lam)
    return s, c_lam, n_lam


def fock_moment_matrices(N: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Fock 기저에서 x₁², x₂² 의 정확한 행렬 X[j, k] = ∫ conj(φ_j) x² φ_k (오대각)

    x₁ = (z + z̄)/2, x₂ = (z − z̄)/2i 와
    zφ_k = √((k+1)/π) φ_{k+1}, ⟨|z|²φ_k, φ_k⟩ = (k+1)/π 로부터 얻는다.
    """
    k = np.arange(N + 1)
    diag = 2.0 * (k + 1) / (4 * np.pi)
    off = np.sqrt((k[:-2] + 1.0) * (k[:-2] + 2.0)) / (4 * np.pi)
    X1 = np.diag(diag) + np.diag(off, 2) + np.diag(off, -2)
    X2 = np.diag(diag) - np.diag(off, 2) - np.diag(off, -2)
    return X1, X2


def basis_semi_axes(N: int, squeeze: float) -> Tuple[float, float]:
    """ψ_0..ψ_N 이 덮는 타원의 반축 √(N/π)·(λ^{−1/2}, λ^{1/2})"""
    r = np.sqrt(max(N, 1) / np.pi)
    return float(r / np.sqrt(squeeze)), float(r * np.sqrt(squeeze))


class LLLBasis:
    """
    ψ_0..ψ_N 를 격자 위에서 한 번 계산해 두는 읽기 전용 표
    """

    def __init__(self, N: int, grid: Grid2D, squeeze: float = 1.0):
        guard = get_settings().fock_guard
        if N < 0 or N > guard:
            raise SizeGuardError(f"기저 차수 {N} 가 허용 범위 [0, {guard}] 를 벗어납니다")
        if not (0.0 < squeeze <= 1.0):
            raise GridError(f"압축 파라미터 λ={squeeze} 는 (0, 1] 이어야 합니다")
        self.N = N
        self.grid = grid
        self.squeeze = float(squeeze)
        self.table = self._build()
        self.table.flags.writeable = False
        logger.info(f"LLL 기저 생성: N={N}, λ={squeeze:.4g}, 격자 {grid.shape}")

    def _build(self) -> np.ndarray:
        z = self.grid.z().ravel()
        s, c_lam, n_lam = squeeze_constants(self.squeeze)
        table = np.empty((self.N + 1, z.size), dtype=np.complex128)
        table[0] = n_lam * np.exp(0.5 * np.pi * (s * z**2 - np.abs(z) ** 2))
        for k in range(self.N):
            nxt = 2.0 * c_lam * np.sqrt(np.pi / (k + 1)) * z * table[k]
            if k:
                nxt -= s * np.sqrt(k / (k + 1)) * table[k - 1]
            table[k + 1] = nxt
        return table

    def _check(self, c: FockCoefficients) -> None:
        if c.N != self.N or not np.isclose(c.squeeze, self.squeeze, rtol=0.0, atol=1e-15):
            raise GridError(
                f"계수 (N={c.N}, λ={c.squeeze}) 가 기저 (N={self.N}, λ={self.squeeze}) 와 맞지 않습니다"
            )

    def synthesize(self, c: FockCoefficients) -> ComplexField:
        self._check(c)
        values = (c.c @ self.table).reshape(self.grid.shape)
        return ComplexField(values, self.grid, {"kind": "lll", "N": self.N, "squeeze": self.squeeze})

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """c_k = ⟨u, ψ_k⟩ = Σ u conj(ψ_k) w"""
        flat = np.asarray(values, dtype=np.complex128).ravel()
        return np.conj(self.table @ np.conj(flat)) * self.grid.weight

    def entire_values(self, c: FockCoefficients, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        u = P(z)·ψ_0 의 다항식 부분 P = Σ c_k q_k 와 P' (q_k = ψ_k/ψ_0)
        소용돌이 위치는 P 의 영점과 같다.
        """
        self._check(c)
        s, c_lam, _ = squeeze_constants(self.squeeze)
        z = np.asarray(z, dtype=np.complex128)
        q_prev, q = np.zeros_like(z), np.ones_like(z)
        dq_prev, dq = np.zeros_like(z), np.zeros_like(z)
        P, dP = c.c[0] * q, np.zeros_like(z)
        for k in range(self.N):
            a = 2.0 * c_lam * np.sqrt(np.pi / (k + 1))
            b = s * np.sqrt(k / (k + 1))
            q_next = a * z * q - b * q_prev
            dq_next = a * (q + z * dq) - b * dq_prev
            q_prev, q = q, q_next
            dq_prev, dq = dq, dq_next
            P = P + c.c[k + 1] * q
            dP = dP + c.c[k + 1] * dq
        return P, dP

    def quadrature_moment_matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        X1, X2 = self.grid.mesh()
        w = self.grid.weight
        conj_table = np.conj(self.table)
        M1 = conj_table @ (self.table * (X1.ravel() ** 2)).T * w
        M2 = conj_table @ (self.table * (X2.ravel() ** 2)).T * w
        return M1, M2

    @cached_property
    def moment_matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        """x₁², x₂² 행렬 (λ=1 이면 정확한 오대각, 아니면 격자 구적)"""
        if self.squeeze == 1.0:
            return fock_moment_matrices(self.N)
        M1, M2 = self.quadrature_moment_matrices()
        # 에르미트 부분만 남긴다
        return 0.5 * (M1 + M1.conj().T), 0.5 * (M2 + M2.conj().T)


@lru_cache(maxsize=2)
def get_basis(N: int, grid: Grid2D, squeeze: float = 1.0) -> LLLBasis:
    return LLLBasis(N, grid, squeeze)
