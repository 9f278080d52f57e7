"""
축약 사상 χ 를 양자화한 메타플렉틱 연산자 M

(Mv)(x) = (λ₁λ₂)^{-1/2} e^{2iπ a x₁x₂} · w(x₁/λ₁, x₂/λ₂),
w = F⁻¹[e^{2iπ ξ₁ξ₂/d} F v],  a = d((λ₁λ₂)⁻¹ − c)

M 은 상수 위상 인자를 제외하고 유일하므로 비교는 위상 불변량으로만 한다.
"""

from typing import Optional

import numpy as np
from scipy.fft import fft2, fftfreq, ifft2
from scipy.interpolate import RectBivariateSpline

from anisotrap.core.errors import GridError, ResolutionError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.core.settings import get_settings
from anisotrap.tools.symplectic.params import DerivedParams
from utils.logger import get_logger

logger = get_logger(__name__)

RESAMPLE_METHODS = ("spectral", "bicubic")


def frequencies(grid: Grid2D):
    """격자에 대응하는 물리 주파수 (ξ₁, ξ₂), ij 인덱싱"""
    xi1 = fftfreq(grid.n1, d=grid.h1)
    xi2 = fftfreq(grid.n2, d=grid.h2)
    return np.meshgrid(xi1, xi2, indexing="ij")


def spectral_derivative(values: np.ndarray, grid: Grid2D, axis: int) -> np.ndarray:
    """D_j u = ∂_j u / (2iπ) 를 푸리에 곱셈 ξ_j 로 계산"""
    XI = frequencies(grid)[axis]
    return ifft2(fft2(values) * XI)


def check_pipeline_input(v: ComplexField, boundary_tol: Optional[float] = None) -> None:
    boundary_tol = get_settings().boundary_mass_tol if boundary_tol is None else boundary_tol
    v.grid.require_power_of_two()
    fraction = v.boundary_mass_fraction()
    if fraction > boundary_tol:
        raise ResolutionError(
            f"경계 질량 비율 {fraction:.2e} 가 허용치 {boundary_tol:.1e} 를 넘습니다: 격자를 넓히세요"
        )


def _interp_matrix(points: np.ndarray, axis_grid: np.ndarray, h: float) -> np.ndarray:
    """
    주기 삼각 보간 행렬 E[j, k] = exp(2iπ ξ_k (t_j − x₀)) / n
    격자 상자 밖의 점은 0 으로 둔다.
    """
    n = axis_grid.size
    xi = fftfreq(n, d=h)
    x0 = axis_grid[0]
    E = np.exp(2j * np.pi * np.outer(points - x0, xi)) / n
    lo, hi = x0 - 0.5 * h, axis_grid[-1] + 0.5 * h
    E[(points < lo) | (points > hi), :] = 0.0
    return E


def _dilate_spectral(spectrum: np.ndarray, grid: Grid2D, s1: float, s2: float) -> np.ndarray:
    """스펙트럼이 spectrum 인 함수 w 를 (x₁/s1, x₂/s2) 에서 평가"""
    E1 = _interp_matrix(grid.x1 / s1, grid.x1, grid.h1)
    E2 = _interp_matrix(grid.x2 / s2, grid.x2, grid.h2)
    return E1 @ spectrum @ E2.T


def _dilate_bicubic(values: np.ndarray, grid: Grid2D, s1: float, s2: float) -> np.ndarray:
    t1, t2 = grid.x1 / s1, grid.x2 / s2
    re = RectBivariateSpline(grid.x1, grid.x2, values.real, kx=3, ky=3)
    im = RectBivariateSpline(grid.x1, grid.x2, values.imag, kx=3, ky=3)
    out = re(t1, t2) + 1j * im(t1, t2)
    inside1 = (t1 >= grid.x1[0]) & (t1 <= grid.x1[-1])
    inside2 = (t2 >= grid.x2[0]) & (t2 <= grid.x2[-1])
    out[~inside1, :] = 0.0
    out[:, ~inside2] = 0.0
    return out


def _dilate(values: np.ndarray, grid: Grid2D, s1: float, s2: float, resample: str) -> np.ndarray:
    if resample == "spectral":
        return _dilate_spectral(fft2(values), grid, s1, s2)
    if resample == "bicubic":
        return _dilate_bicubic(values, grid, s1, s2)
    raise GridError(f"알 수 없는 재표본 방식: {resample} (가능: {RESAMPLE_METHODS})")


def quadratic_phase(dp: DerivedParams, grid: Grid2D) -> np.ndarray:
    X1, X2 = grid.mesh()
    a = dp.d * (1.0 / (dp.lambda1 * dp.lambda2) - dp.c)
    return np.exp(2j * np.pi * a * X1 * X2)


def apply_metaplectic(dp: DerivedParams, v: ComplexField, resample: str = "spectral") -> ComplexField:
    """
    M v 를 푸리에 곱셈자 파이프라인으로 계산한다.

    Args:
        dp: 파생 파라미터 (λ₁, λ₂, c, d)
        v: 2의 거듭제곱 격자 위 필드, 경계에서 충분히 작아야 함
        resample: "spectral" (정확한 삼각 보간) 또는 "bicubic"

    Raises:
        GridError: 2의 거듭제곱이 아닌 격자
        ResolutionError: 경계 질량 초과
    """
    check_pipeline_input(v)
    grid = v.grid
    XI1, XI2 = frequencies(grid)
    spectrum = fft2(v.values) * np.exp(2j * np.pi * XI1 * XI2 / dp.d)

    if resample == "spectral":
        w = _dilate_spectral(spectrum, grid, dp.lambda1, dp.lambda2)
    else:
        w = _dilate(ifft2(spectrum), grid, dp.lambda1, dp.lambda2, resample)

    out = w * quadratic_phase(dp, grid) / np.sqrt(dp.lambda1 * dp.lambda2)
    return v.with_values(out)


def apply_metaplectic_adjoint(dp: DerivedParams, u: ComplexField, resample: str = "spectral") -> ComplexField:
    """M* u: 위상 제거 → 역 팽창 → 역 곱셈자"""
    check_pipeline_input(u)
    grid = u.grid
    undone = u.values * np.conj(quadratic_phase(dp, grid)) * np.sqrt(dp.lambda1 * dp.lambda2)
    w = _dilate(undone, grid, 1.0 / dp.lambda1, 1.0 / dp.lambda2, resample)
    XI1, XI2 = frequencies(grid)
    out = ifft2(fft2(w) * np.exp(-2j * np.pi * XI1 * XI2 / dp.d))
    return u.with_values(out)


def apply_multiplier(dp: DerivedParams, v: ComplexField) -> ComplexField:
    """e^{2iπ d⁻¹ D₁D₂} 단독 적용 (이산 변환에서 정확히 노름 보존)"""
    v.grid.require_power_of_two()
    XI1, XI2 = frequencies(v.grid)
    return v.with_values(ifft2(fft2(v.values) * np.exp(2j * np.pi * XI1 * XI2 / dp.d)))


def quadratic_expectation(Q: np.ndarray, field: ComplexField) -> float:
    """
    ⟨q^w u, u⟩ / ‖u‖², q(X) = XᵀQX, X = (x₁, x₂, ξ₁, ξ₂)

    ⟨(x_i x_j)^w⟩ = ∫x_i x_j|u|², ⟨(ξ_i ξ_j)^w⟩ = ⟨D_j u, D_i u⟩,
    ⟨(x_i ξ_j)^w⟩ = Re⟨x_i D_j u, u⟩
    """
    grid = field.grid
    u = field.values
    X = grid.mesh()
    D = [spectral_derivative(u, grid, 0), spectral_derivative(u, grid, 1)]
    w = grid.weight
    norm_sq = np.sum(np.abs(u) ** 2) * w

    moments = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            moments[i, j] = np.sum(X[i] * X[j] * np.abs(u) ** 2) * w
            moments[2 + i, 2 + j] = np.real(np.sum(D[j] * np.conj(D[i]))) * w
            mixed = np.real(np.sum(X[i] * D[j] * np.conj(u))) * w
            moments[i, 2 + j] = moments[2 + j, i] = mixed
    return float(np.sum(np.asarray(Q) * moments) / norm_sq)


def product_ground_state(mu1: float, mu2: float, grid: Grid2D) -> ComplexField:
    """φ_{μ₁}(y₁)φ_{μ₂}(y₂), Σ(μ_j²y_j² + D_j²) 의 바닥 상태"""
    Y1, Y2 = grid.mesh()
    values = np.sqrt(2.0) * (mu1 * mu2) ** 0.25 * np.exp(-np.pi * (mu1 * Y1**2 + mu2 * Y2**2))
    return ComplexField(values.astype(np.complex128), grid)
