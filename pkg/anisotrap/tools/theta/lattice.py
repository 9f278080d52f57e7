"""
세타 함수와 격자 파동함수, Abrikosov 함수 γ(τ)

Θ(z, τ) = (1/i) Σ_n (−1)^n e^{iπτ(n+½)²} e^{(2n+1)iπz}
  Θ(z+1) = −Θ(z),  Θ(z+τ) = −e^{−iπτ−2iπz} Θ(z)
  영점은 격자 Z⊕τZ 에 있고 격자 셀마다 정확히 하나

u_τ(x) = e^{π(z²−|z|²)/2} Θ(√τ_I z, τ)
  |u_τ| 의 주기 격자는 (1/√τ_I)(Z⊕τZ) (셀 넓이 1)
"""

import math
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import minimize_scalar

from anisotrap.core.constant import (
    ABRIKOSOV_B,
    ABRIKOSOV_MARGIN,
    ABRIKOSOV_SKIRT,
    CELL_QUADRATURE_POINTS,
    HEXAGONAL_TAU,
    KERNEL_REACH,
    TAU_IMAG_MIN,
    TAU_MATCH_TOL,
    TAU_MAX_REFINE,
    TAU_SCAN_IMAG_MAX,
    TAU_STEP_TOL,
    TAU_XATOL,
    THETA_TAIL,
)
from anisotrap.core.errors import ConvergenceError, GridError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.core.settings import get_settings
from anisotrap.tools.fock.projector import project_lll, synthesize
from utils.logger import get_logger

logger = get_logger(__name__)


class LatticeTau(BaseModel):
    """격자 모양 파라미터 τ = tau_real + i·tau_imag"""

    model_config = ConfigDict(frozen=True)

    tau_real: float = Field(default=HEXAGONAL_TAU.real)
    tau_imag: float = Field(default=HEXAGONAL_TAU.imag, ge=TAU_IMAG_MIN)

    @classmethod
    def from_complex(cls, tau: complex) -> "LatticeTau":
        return cls(tau_real=float(np.real(tau)), tau_imag=float(np.imag(tau)))

    @classmethod
    def hexagonal(cls) -> "LatticeTau":
        return cls.from_complex(HEXAGONAL_TAU)

    @classmethod
    def square(cls) -> "LatticeTau":
        return cls(tau_real=0.0, tau_imag=1.0)

    @property
    def tau(self) -> complex:
        return complex(self.tau_real, self.tau_imag)

    @property
    def nome(self) -> complex:
        return complex(np.exp(1j * np.pi * self.tau))

    def periods(self) -> Tuple[complex, complex]:
        """u_τ 의 |·| 주기 (1/√τ_I, τ/√τ_I)"""
        s = 1.0 / math.sqrt(self.tau_imag)
        return complex(s, 0.0), self.tau * s

    def canonical(self) -> "LatticeTau":
        """τ → τ+1, τ → −1/τ 로 기본 영역 |τ_R| ≤ ½, |τ| ≥ 1 로 옮긴다"""
        tau = self.tau
        for _ in range(100):
            tau = tau - math.floor(tau.real + 0.5)
            if abs(tau) >= 1.0 - 1e-15:
                break
            tau = -1.0 / tau
        return LatticeTau.from_complex(tau)

    def reflected(self) -> "LatticeTau":
        """τ → −τ̄ (γ 는 불변)"""
        return LatticeTau(tau_real=-self.tau_real, tau_imag=self.tau_imag)

    def in_fundamental_domain(self, tol: float = 1e-12) -> bool:
        return abs(self.tau_real) <= 0.5 + tol and abs(self.tau) >= 1.0 - tol


def theta_terms(tau_imag: float) -> int:
    """축약된 인자에서 다음 항이 e^{−THETA_TAIL} 미만이 되는 N_θ"""
    return int(math.ceil(math.sqrt(THETA_TAIL / (math.pi * tau_imag) + 0.25))) + 1


def theta_series(z, tau: LatticeTau, n_terms: int):
    """축약 없이 Σ_{−n_terms−1 ≤ n ≤ n_terms} 를 그대로 더한다"""
    z = np.asarray(z, dtype=np.complex128)
    total = np.zeros_like(z)
    for n in range(-n_terms - 1, n_terms + 1):
        total += (-1) ** n * np.exp(1j * np.pi * tau.tau * (n + 0.5) ** 2 + (2 * n + 1) * 1j * np.pi * z)
    return total / 1j


def _reduce(z, tau: LatticeTau) -> Tuple[np.ndarray, np.ndarray]:
    """
    z = z₀ + kτ + l (|Im z₀| ≤ τ_I/2) 로 나누고
    Θ(z) = e^{L}·Θ(z₀) 의 로그 인자 L = iπ(k+l) − iπτk² − 2iπk z₀ 를 돌려준다
    """
    z = np.asarray(z, dtype=np.complex128)
    k = np.round(z.imag / tau.tau_imag)
    shifted = z - k * tau.tau
    l = np.round(shifted.real)
    z0 = shifted - l
    log_factor = 1j * np.pi * (k + l) - 1j * np.pi * tau.tau * k**2 - 2j * np.pi * k * z0
    return z0, log_factor


def theta_eval(z, tau: LatticeTau):
    z0, log_factor = _reduce(z, tau)
    return np.exp(log_factor) * theta_series(z0, tau, theta_terms(tau.tau_imag))


def u_tau_eval(z, tau: LatticeTau):
    """
    u_τ(z) 를 로그 영역에서 결합해 계산한다
    (가우스 인자와 준주기 인자의 큰 지수는 서로 상쇄된다)
    """
    z = np.asarray(z, dtype=np.complex128)
    z0, log_factor = _reduce(math.sqrt(tau.tau_imag) * z, tau)
    log_gauss = 0.5 * np.pi * (z**2 - np.abs(z) ** 2)
    return np.exp(log_gauss + log_factor) * theta_series(z0, tau, theta_terms(tau.tau_imag))


def u_tau_field(tau: LatticeTau, grid: Grid2D) -> ComplexField:
    return ComplexField(u_tau_eval(grid.z(), tau), grid, {"kind": "u_tau", "tau": [tau.tau_real, tau.tau_imag]})


def gamma_tau(tau: LatticeTau, check: bool = False) -> float:
    """
    γ(τ) = Σ_{(j,k)∈Z²} e^{−(π/τ_I)|jτ−k|²}

    check=True 이면 셀 평균 ⨍|u_τ|⁴/(⨍|u_τ|²)² 와 비교해 1e-6 을 넘으면 경고한다.
    """
    t = tau.tau
    ti = tau.tau_imag
    j_max = int(math.ceil(math.sqrt(THETA_TAIL / (math.pi * ti))))
    k_span = int(math.ceil(math.sqrt(THETA_TAIL * ti / math.pi))) + 1
    j = np.arange(-j_max, j_max + 1)[:, None]
    k = np.round(j * tau.tau_real) + np.arange(-k_span, k_span + 1)[None, :]
    value = float(np.sum(np.exp(-(np.pi / ti) * np.abs(j * t - k) ** 2)))
    if check:
        cell, _ = gamma_cell_average(tau)
        if abs(cell - value) > 1e-6:
            logger.warning(f"γ 격자합 {value:.10f} 와 셀 평균 {cell:.10f} 가 다릅니다 (τ={t})")
    return value


def gamma_cell_average(tau: LatticeTau, n: int = CELL_QUADRATURE_POINTS) -> Tuple[float, float]:
    """
    기본 셀 위의 중점 구적 (주기 함수이므로 지수적으로 수렴)

    Returns:
        (γ, ⨍|u_τ|²)
    """
    a, b = tau.periods()
    s = (np.arange(n) + 0.5) / n
    S, T = np.meshgrid(s, s, indexing="ij")
    density = np.abs(u_tau_eval(S * a + T * b, tau)) ** 2
    mean2 = float(np.mean(density))
    mean4 = float(np.mean(density**2))
    return mean4 / mean2**2, mean2


def abrikosov_multiplier(tau: LatticeTau) -> float:
    """λ_τ = ⨍|u_τ|⁴/⨍|u_τ|² = γ(τ)/√(2τ_I)"""
    return gamma_tau(tau) / math.sqrt(2.0 * tau.tau_imag)


def _scan_points(n_grid: int, tau_real: Optional[float]) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n_grid)
    if tau_real is not None:
        lo = math.sqrt(max(0.0, 1.0 - tau_real**2))
        return tau_real + 1j * (lo + t * (TAU_SCAN_IMAG_MAX - lo))
    points = []
    for r in np.linspace(-0.5, 0.5, n_grid):
        lo = math.sqrt(1.0 - r**2)
        points.extend(r + 1j * (lo + t * (TAU_SCAN_IMAG_MAX - lo)))
    return np.asarray(points)


def gamma_scan(n_grid: int, tau_real: Optional[float] = None, n_jobs: Optional[int] = None) -> pd.DataFrame:
    """
    기본 영역 (tau_real 을 주면 그 수직선) 위의 γ 표
    점마다 독립이므로 joblib 으로 병렬 계산한다.
    """
    if n_grid < 2:
        raise GridError(f"스캔 격자는 2 이상이어야 합니다: {n_grid}")
    points = _scan_points(n_grid, tau_real)
    n_jobs = get_settings().n_jobs if n_jobs is None else n_jobs
    values = Parallel(n_jobs=n_jobs)(delayed(gamma_tau)(LatticeTau.from_complex(p)) for p in points)
    return pd.DataFrame({"tau_real": points.real, "tau_imag": points.imag, "gamma": values})


def _refine_imag(tau: LatticeTau) -> LatticeTau:
    lo = math.sqrt(max(0.0, 1.0 - tau.tau_real**2))
    res = minimize_scalar(
        lambda ti: gamma_tau(LatticeTau(tau_real=tau.tau_real, tau_imag=ti)),
        bounds=(lo, TAU_SCAN_IMAG_MAX),
        method="bounded",
        options={"xatol": TAU_XATOL},
    )
    return LatticeTau(tau_real=tau.tau_real, tau_imag=float(res.x))


def _refine_real(tau: LatticeTau) -> LatticeTau:
    # γ(−τ̄) = γ(τ) 이므로 τ_R ≤ 0 쪽만 본다
    hi = -math.sqrt(max(0.0, 1.0 - tau.tau_imag**2))
    if hi <= -0.5:
        return tau
    res = minimize_scalar(
        lambda tr: gamma_tau(LatticeTau(tau_real=tr, tau_imag=tau.tau_imag)),
        bounds=(-0.5, hi),
        method="bounded",
        options={"xatol": TAU_XATOL},
    )
    return LatticeTau(tau_real=float(res.x), tau_imag=tau.tau_imag)


def optimize_tau(
    n_grid: int = 16,
    refine: int = TAU_MAX_REFINE,
    tau_real: Optional[float] = None,
    seed: Optional[LatticeTau] = None,
    n_jobs: Optional[int] = None,
) -> Tuple[LatticeTau, float]:
    """
    거친 스캔 후 좌표별 유계 Brent 정밀화로 γ 를 최소화한다.

    tau_real 을 주면 그 수직선 위에서만 τ_I 를 최적화한다.
    seed 를 주면 스캔을 건너뛰고 그 점에서 정밀화를 시작한다.

    Raises:
        ConvergenceError: refine 회 안에 좌표 변화가 수렴하지 않거나,
            전체 영역 탐색 결과가 육각 격자점에서 벗어나는 경우
    """
    logger.info("--optimize_tau START--")
    if seed is not None:
        current = seed.canonical()
    else:
        table = gamma_scan(n_grid, tau_real, n_jobs)
        best = table.loc[table["gamma"].idxmin()]
        current = LatticeTau(tau_real=float(best["tau_real"]), tau_imag=float(best["tau_imag"]))
        logger.info(f"스캔 최소: τ=({current.tau_real:.4f}, {current.tau_imag:.4f}), γ={best['gamma']:.6f}")

    if tau_real is None and current.tau_real > 0:
        current = current.reflected()

    for step in range(1, refine + 1):
        previous = current
        if tau_real is None:
            current = _refine_real(current)
        current = _refine_imag(current)
        if abs(current.tau - previous.tau) < TAU_STEP_TOL:
            break
    else:
        raise ConvergenceError(f"τ 정밀화가 {refine} 회 안에 수렴하지 않았습니다: τ={current.tau}")

    if tau_real is None:
        current = current.canonical()
    b = gamma_tau(current)
    logger.info(f"τ*=({current.tau_real:.8f}, {current.tau_imag:.8f}), γ={b:.8f}, 정밀화 {step} 회")

    if tau_real is None and seed is None:
        if abs(current.tau - HEXAGONAL_TAU) > TAU_MATCH_TOL or abs(b - ABRIKOSOV_B) > TAU_MATCH_TOL:
            raise ConvergenceError(f"γ 최소점 τ*={current.tau}, b={b} 가 육각 격자와 다릅니다")
    logger.info("--optimize_tau END--")
    return current, b


def cell_vortex_count(tau: LatticeTau, offset: complex = 0j, points_per_side: int = 256) -> int:
    """offset 을 중심으로 하는 (1/√τ_I)(Z⊕τZ) 셀 경계를 따라 잰 u_τ 의 회전수"""
    a, b = tau.periods()
    start = offset - 0.5 * (a + b)
    corners = [start, start + a, start + a + b, start + b, start]
    t = np.arange(points_per_side) / points_per_side
    path = np.concatenate([c0 + t * (c1 - c0) for c0, c1 in zip(corners[:-1], corners[1:])] + [[start]])
    phase = np.angle(u_tau_eval(path, tau))
    winding = np.sum(np.angle(np.exp(1j * np.diff(phase)))) / (2 * np.pi)
    return int(round(winding))


def radial_window(grid: Grid2D, radius: float, skirt: float = ABRIKOSOV_SKIRT) -> np.ndarray:
    """r ≤ radius−skirt 에서 1, raised-cosine 으로 r = radius 에서 0"""
    r = np.abs(grid.z())
    plateau = radius - skirt
    w = 0.5 * (1.0 + np.cos(np.pi * np.clip((r - plateau) / skirt, 0.0, 1.0)))
    return np.where(r <= plateau, 1.0, w)


def abrikosov_el_residual(
    tau: LatticeTau,
    grid: Grid2D,
    N: Optional[int] = None,
    cells: float = 8.0,
    multiplier: Optional[float] = None,
    core: Optional[float] = None,
) -> float:
    """
    창을 씌운 u_τ 로 Π₀(|u_τ|²u_τ) = λ_τ u_τ 를 확인한다.

    창 반지름은 cells 개 격자 간격의 절반이다. 잔차는 원점 중심 반지름 core
    (기본: 격자 간격 하나) 의 고정 영역에서 ‖Π₀(|wu|²wu) − λ w³u‖ / ‖Π₀(|wu|²wu)‖ 로 잰다.
    창 가장자리의 영향은 평탄부까지의 거리 d 에 대해 e^{−πd²} 정도로 줄어들므로
    창이 커질수록 잔차가 작아진다. (multiplier=0 이면 정확히 1)

    Raises:
        GridError: 평탄부가 core 를 덮지 못하거나 격자가 창과 커널 도달 거리를 덮지 못하는 경우
    """
    a, _ = tau.periods()
    radius = 0.5 * cells * abs(a)
    core = abs(a) if core is None else core
    gap = radius - ABRIKOSOV_SKIRT - core
    if gap <= 0.0:
        raise GridError(f"창이 너무 작아 잔차를 잴 영역이 없습니다 (cells={cells}, core={core:.3f})")
    if gap < ABRIKOSOV_MARGIN:
        logger.warning(f"창이 작습니다: 평탄부와 핵심 영역 사이 거리 {gap:.3f} < {ABRIKOSOV_MARGIN:g}")
    reach = radius + KERNEL_REACH
    if min(-grid.x1_min, grid.x1_max, -grid.x2_min, grid.x2_max) < reach:
        raise GridError(f"격자가 창 반지름 {radius:.2f} 와 커널 도달 거리를 덮지 못합니다 (필요 {reach:.2f})")
    if N is None:
        N = int(math.ceil(np.pi * reach**2))

    u = u_tau_field(tau, grid).values
    w = radial_window(grid, radius)
    wu = w * u
    projected = synthesize(project_lll(ComplexField(np.abs(wu) ** 2 * wu, grid), N), grid).values

    lam = abrikosov_multiplier(tau) if multiplier is None else multiplier
    mask = np.abs(grid.z()) <= core
    diff = projected[mask] - lam * (w**3 * u)[mask]
    residual = float(np.linalg.norm(diff) / np.linalg.norm(projected[mask]))
    logger.info(f"Abrikosov 잔차: τ={tau.tau:.4f}, cells={cells}, N={N}, λ={lam:.6f}, 잔차={residual:.3e}")
    return residual
