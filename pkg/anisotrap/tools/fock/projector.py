"""
Λ₀ 위로의 직교 사영 Π₀ 와 관련 항등식

- project_lll / synthesize: Fock 전개에 의한 사영 (정식 구현)
- project_kernel_oracle: 커널 e^{−π|x−y|²/2 + iπ(x₂y₁−y₂x₁)} 의 직접 구적 (작은 격자 검증용)
- carlen_check: ∫|∇|u||² = π∫|u|² (P, P' 로 닫힌 형태 평가)
- x2sq_rayleigh: ∫x₂²|u|² / ∫|u|² ≥ 1/(4π)
"""

from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln

from anisotrap.core.constant import KERNEL_BLOCK_ROWS, KERNEL_ORACLE_MAX_POINTS, TRUNCATION_LEAK
from anisotrap.core.errors import SizeGuardError
from anisotrap.core.grid import ComplexField, Grid2D
from utils.logger import get_logger

from .basis import FockCoefficients, fock_moment_matrices, get_basis, squeeze_constants

logger = get_logger(__name__)


def warn_truncation(c: FockCoefficients, context: str = "") -> None:
    ratio = c.truncation_ratio()
    if ratio > TRUNCATION_LEAK:
        logger.warning(
            f"{context} 절단 누수: |c_N|/max|c_k| = {ratio:.2e} > {TRUNCATION_LEAK:g} (N={c.N})"
        )


def project_lll(u: ComplexField, N: int, squeeze: float = 1.0) -> FockCoefficients:
    """
    c_k = ⟨u, ψ_k⟩ 를 구적으로 계산한다. Σ c_k ψ_k 가 Π₀u 의 절단이다.
    """
    basis = get_basis(N, u.grid, squeeze)
    c = FockCoefficients(basis.analyze(u.values), squeeze)
    warn_truncation(c, "project_lll")
    return c


def synthesize(c: FockCoefficients, grid: Grid2D) -> ComplexField:
    return get_basis(c.N, grid, c.squeeze).synthesize(c)


def project_kernel_oracle(u: ComplexField) -> ComplexField:
    """
    (Π₀u)(x) = ∫ e^{−π|x−y|²/2 + iπ(x₂y₁−y₂x₁)} u(y) dy 를 행 블록 단위로 직접 계산

    Raises:
        SizeGuardError: 격자 점 수가 64² 를 넘는 경우
    """
    grid = u.grid
    M = grid.n1 * grid.n2
    if M > KERNEL_ORACLE_MAX_POINTS:
        raise SizeGuardError(f"커널 오라클은 {KERNEL_ORACLE_MAX_POINTS} 점 이하 격자만 허용합니다: {M}")

    X1, X2 = grid.mesh()
    x1, x2 = X1.ravel(), X2.ravel()
    values = u.values.ravel()
    out = np.empty(M, dtype=np.complex128)
    for start in range(0, M, KERNEL_BLOCK_ROWS):
        rows = slice(start, start + KERNEL_BLOCK_ROWS)
        a1, a2 = x1[rows, None], x2[rows, None]
        exponent = -0.5 * np.pi * ((a1 - x1) ** 2 + (a2 - x2) ** 2) + 1j * np.pi * (a2 * x1 - x2 * a1)
        out[rows] = np.exp(exponent) @ values
    return u.with_values(out.reshape(grid.shape) * grid.weight)


def carlen_check(c: FockCoefficients, grid: Grid2D) -> Tuple[float, float]:
    """
    u = P(z)ψ_0, |ψ_0| = N_λ e^{π(s·Re z² − |z|²)/2} 이면 영점 밖에서
    ∇log|u| = conj(P'/P + πsz − πz̄) 이므로
        |∇|u||² = |ψ_0|² |P' + π(sz − z̄)P|²
    우변은 영점에서도 매끄럽고, 격자 구적은 지수적으로 수렴한다.

    Returns:
        (lhs, rhs): lhs = ∫|∇|u||², rhs = π‖u‖²
    """
    basis = get_basis(c.N, grid, c.squeeze)
    s, _, n_lam = squeeze_constants(c.squeeze)
    z = grid.z()
    P, dP = basis.entire_values(c, z)
    gauss = n_lam * np.exp(0.5 * np.pi * (s * np.real(z**2) - np.abs(z) ** 2))
    grad_sq = (gauss * np.abs(dP + np.pi * (s * z - np.conj(z)) * P)) ** 2
    lhs = float(np.sum(grad_sq) * grid.weight)
    rhs = float(np.pi * np.sum((gauss * np.abs(P)) ** 2) * grid.weight)
    return lhs, rhs


def x2sq_rayleigh(c: FockCoefficients, grid: Optional[Grid2D] = None) -> float:
    """
    ∫x₂²|u|² / ‖u‖²

    grid 가 없으면 (Fock 기저에 한해) 정확한 오대각 행렬로 계산한다.
    """
    if grid is None:
        if c.squeeze != 1.0:
            raise ValueError("압축 기저 계수는 격자를 지정해야 합니다")
        _, X2 = fock_moment_matrices(c.N)
        return float(np.real(np.conj(c.c) @ X2 @ c.c) / np.sum(np.abs(c.c) ** 2))
    u = synthesize(c, grid)
    _, X2 = grid.mesh()
    return float(np.sum(X2**2 * u.density) / np.sum(u.density))


def tapered_u0_coefficients(s: float, N: int) -> FockCoefficients:
    """
    u₀ = e^{πz²/2}e^{−π|z|²/2} 의 Fock 계수 c_{2m} = √((2m)!)/(2^m m!) 에 s^m 을 곱한 절단
    (s<1 이면 압축 진공 ψ_0^λ, λ=(1−s)/(1+s) 에 해당하며 ⟨x₂²⟩ = (1+λ)/(4π))
    """
    if not (0.0 <= s < 1.0):
        raise ValueError(f"s={s} 는 [0, 1) 이어야 합니다")
    m = np.arange(N // 2 + 1)
    taper = m * np.log(s) if s > 0 else np.where(m == 0, 0.0, -np.inf)
    log_c = 0.5 * gammaln(2 * m + 1) - m * np.log(2.0) - gammaln(m + 1) + taper
    c = np.zeros(N + 1, dtype=np.complex128)
    c[2 * m] = np.exp(log_c)
    c = FockCoefficients(c).normalized()
    warn_truncation(c, "tapered_u0")
    return c


def windowed_u0(grid: Grid2D, width: float) -> ComplexField:
    """u₀ = e^{−πx₂² + iπx₁x₂} 에 x₁ 방향 가우스 창 e^{−x₁²/(2 width²)} 을 곱한 필드"""
    X1, X2 = grid.mesh()
    values = np.exp(-np.pi * X2**2 + 1j * np.pi * X1 * X2 - X1**2 / (2 * width**2))
    return ComplexField(values, grid, {"kind": "u0_window", "width": width})


def bargmann_transform(f: np.ndarray, y: np.ndarray, grid: Grid2D) -> ComplexField:
    """
    L²(ℝ) → Λ₀: u(z) = 2^{1/4} ∫ e^{2πyz − πy² − πz²/2} f(y) dy · e^{−π|z|²/2}
    f 는 균일 격자 y 위의 표본
    """
    y = np.asarray(y, dtype=float)
    dy = y[1] - y[0]
    z = grid.z().ravel()
    out = np.empty(z.size, dtype=np.complex128)
    for start in range(0, z.size, KERNEL_BLOCK_ROWS):
        zz = z[start : start + KERNEL_BLOCK_ROWS, None]
        kernel = np.exp(2 * np.pi * y * zz - np.pi * y**2 - 0.5 * np.pi * zz**2 - 0.5 * np.pi * np.abs(zz) ** 2)
        out[start : start + KERNEL_BLOCK_ROWS] = kernel @ f
    return ComplexField(2**0.25 * dy * out.reshape(grid.shape), grid)


def wick_x2sq_check(mu: float, grid: Grid2D, y: np.ndarray) -> Tuple[float, float]:
    """
    x₂² 의 Wick 항등식: v = φ_μ 에 대해
    ∫x₂²|Bv|² = ⟨D²v, v⟩ + 1/(4π)

    Returns:
        (lhs, rhs): 좌변은 Bargmann 변환의 격자 구적, 우변은 1차원 구적
    """
    y = np.asarray(y, dtype=float)
    dy = y[1] - y[0]
    v = 2**0.25 * mu**0.25 * np.exp(-np.pi * mu * y**2)
    u = bargmann_transform(v, y, grid)
    _, X2 = grid.mesh()
    lhs = float(np.sum(X2**2 * u.density) * grid.weight)
    dv = np.gradient(v, dy)
    rhs = float(np.sum(dv**2) * dy / (4 * np.pi**2) + 1.0 / (4 * np.pi))
    return lhs, rhs
