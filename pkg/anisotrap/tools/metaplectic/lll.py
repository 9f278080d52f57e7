"""
비등방 LLL 함수와 소멸 연산자 잔차
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from anisotrap.core.errors import DegenerateGaussianError, SizeGuardError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.core.settings import get_settings
from anisotrap.tools.symplectic.params import DerivedParams
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class EntirePoly:
    """복소 한 변수 다항식 a_0 + a_1 w + ... + a_m w^m (전해석 인자 F 의 절단)"""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        if not np.all(np.isfinite(coeffs)):
            raise SizeGuardError("다항식 계수에 비유한 값이 있습니다")
        nonzero = np.flatnonzero(coeffs)
        coeffs = coeffs[: nonzero[-1] + 1] if nonzero.size else np.zeros(1, dtype=np.complex128)
        cap = get_settings().degree_cap
        if coeffs.size - 1 > cap:
            raise SizeGuardError(f"다항식 차수 {coeffs.size - 1} 가 상한 {cap} 를 넘습니다")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def constant(cls, value: complex = 1.0) -> "EntirePoly":
        return cls(np.array([value]))

    @classmethod
    def from_roots(cls, roots) -> "EntirePoly":
        return cls(P.polyfromroots(np.asarray(roots, dtype=np.complex128)))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    def __call__(self, w: np.ndarray) -> np.ndarray:
        return P.polyval(w, self.coeffs)


def gaussian_coefficients(dp: DerivedParams):
    """
    exp(−[A x₁² + B x₂² + iC x₁x₂]) 의 (A, B, C)

    Raises:
        DegenerateGaussianError: 2α − ν² ≤ 허용치
    """
    nu2 = dp.trap.nu**2
    if 2 * dp.alpha - nu2 <= get_settings().matrix_tol:
        raise DegenerateGaussianError(f"2α−ν² = {2 * dp.alpha - nu2:.3e}: 가우스 인자가 퇴화했습니다")
    gamma, beta2, ratio = dp.gamma_par, dp.beta2, nu2 / (2 * dp.alpha)
    A = gamma * np.pi / (4 * beta2) * (1 - ratio)
    B = gamma * np.pi * beta2 / 4 * (1 + ratio)
    C = np.pi * nu2 * gamma / (4 * dp.alpha)
    return A, B, C


def anisotropic_lll_sample(dp: DerivedParams, F: EntirePoly, grid: Grid2D) -> ComplexField:
    """
    F(x₁ + iβ₂x₂) · exp(−[A x₁² + B x₂² + iC x₁x₂]) 를 격자에 표본화한다.
    """
    A, B, C = gaussian_coefficients(dp)
    X1, X2 = grid.mesh()
    values = F(X1 + 1j * dp.beta2 * X2) * np.exp(-(A * X1**2 + B * X2**2 + 1j * C * X1 * X2))
    return ComplexField(values, grid, {"kind": "anisotropic_lll", "degree": F.degree})


def _d4(u: np.ndarray, h: float, axis: int) -> np.ndarray:
    """4차 중심 차분 ∂u (양끝 두 줄 제외)"""
    s = [slice(2, -2)] * 2
    def shift(k):
        idx = list(s)
        idx[axis] = slice(2 + k, u.shape[axis] - 2 + k)
        return u[tuple(idx)]
    return (-shift(2) + 8 * shift(1) - 8 * shift(-1) + shift(-2)) / (12 * h)


def annihilator_residual(dp: DerivedParams, u: ComplexField) -> float:
    """
    ‖𝓛u‖₂ / ‖u‖₂ (내부 격자), 𝓛 = k₁x₁ + λ₂D₂ − i m D₁ − i n x₂
    k₁ = λ₂cd − d/λ₁, m = μ₂λ₁/d, n = μ₂cλ₁, D = ∂/(2iπ)
    """
    grid = u.grid
    l1, l2, c, d, mu2 = dp.lambda1, dp.lambda2, dp.c, dp.d, dp.mu2
    k1 = l2 * c * d - d / l1
    m = mu2 * l1 / d
    n = mu2 * c * l1

    X1, X2 = grid.mesh()
    X1, X2 = X1[2:-2, 2:-2], X2[2:-2, 2:-2]
    core = u.values[2:-2, 2:-2]
    D1 = _d4(u.values, grid.h1, 0) / (2j * np.pi)
    D2 = _d4(u.values, grid.h2, 1) / (2j * np.pi)

    Lu = k1 * X1 * core + l2 * D2 - 1j * m * D1 - 1j * n * X2 * core
    return float(np.linalg.norm(Lu) / np.linalg.norm(core))


def isotropic_lll_sample(f: EntirePoly, grid: Grid2D) -> ComplexField:
    """f(z) e^{−π|z|²} (ν=0 에서의 LLL 원소)"""
    z = grid.z()
    return ComplexField(f(z) * np.exp(-np.pi * np.abs(z) ** 2), grid)
