"""
절단된 Λ₀ 위에서 I(ε, κ) = inf{E(u) : ‖u‖ = 1} 의 사영 경사 하강

계수 c 에 대해
    E(c) = ½ c*Ac + (g₀/2)∫|u|⁴,  A = ε²X₁ + κ²X₂ (X_j: x_j² 의 기저 행렬)
    F(c) = ½Ac + g₀ Π_N(|u|²u),   λ = ⟨F, c⟩ (실수)
    r = F − λc 가 구면 위의 사영 기울기이며 Euler–Lagrange 잔차이다.
한 걸음은 c ← (c − t r)/‖c − t r‖, t 는 Barzilai–Borwein 길이에서 Armijo 역추적.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, InstanceOf
from scipy.linalg import eigh

from anisotrap.core.constant import KERNEL_REACH, SOLVER_SETTINGS
from anisotrap.core.errors import AnisotrapError, InvalidParameterError
from anisotrap.core.grid import Grid2D
from anisotrap.core.settings import get_settings
from anisotrap.tools.energy.bounds import lll_squeeze, weak_ansatz
from anisotrap.tools.energy.models import EnergyBreakdown, ReducedParams, classify_regime, energy_from_moments
from anisotrap.tools.energy.strong import strong_test_function
from anisotrap.tools.fock.basis import FockCoefficients, LLLBasis, basis_semi_axes, get_basis
from anisotrap.tools.fock.projector import project_lll, warn_truncation
from anisotrap.tools.theta.lattice import LatticeTau
from utils.logger import get_logger

logger = get_logger(__name__)

MIN_DEGREE = 4


class SolverOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    grid: InstanceOf[Grid2D] = Field(..., description="합성/구적 격자")
    squeeze: Optional[float] = Field(default=None, gt=0.0, le=1.0, description="압축 기저 λ (없으면 영역별 자동)")
    tolerance: float = Field(default=SOLVER_SETTINGS["tolerance"], gt=0.0, description="grad_norm < tol·max(1, E)")
    max_iter: int = Field(default=SOLVER_SETTINGS["max_iter"], ge=1)
    restarts: int = Field(default=SOLVER_SETTINGS["restarts"], ge=1, description="따뜻한 시작과 독립 무작위 시작 포함 시작점 수")
    initial_step: float = Field(default=SOLVER_SETTINGS["initial_step"], gt=0.0)
    seed: int = Field(default=0, ge=0)
    warm_start: Optional[InstanceOf[FockCoefficients]] = Field(default=None, description="지정하면 영역별 시작점 대신 사용")
    n_jobs: Optional[int] = Field(default=None, description="재시작 병렬 수 (없으면 설정값)")


@dataclass(frozen=True)
class MinimizerResult:
    coeffs: FockCoefficients
    energy: EnergyBreakdown
    iterations: int
    grad_norm: float
    converged: bool
    seed: int
    multiplier: float = 0.0
    history: Tuple[float, ...] = field(default=(), compare=False)
    restart_energies: Tuple[float, ...] = field(default=(), compare=False)

    def to_dict(self) -> dict:
        return {
            "energy": self.energy.model_dump(),
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "converged": self.converged,
            "seed": self.seed,
            "multiplier": self.multiplier,
            "N": self.coeffs.N,
            "squeeze": self.coeffs.squeeze,
            "truncation_ratio": self.coeffs.truncation_ratio(),
            "restart_energies": list(self.restart_energies),
        }


class _Functional:
    """고정된 (기저, 파라미터) 에 대한 E 와 F 의 평가기"""

    def __init__(self, basis: LLLBasis, rp: ReducedParams):
        self.basis = basis
        self.rp = rp
        X1, X2 = basis.moment_matrices
        self.X1, self.X2 = X1, X2
        self.A = rp.eps**2 * X1 + rp.kappa**2 * X2

    def field_values(self, c: np.ndarray) -> np.ndarray:
        return c @ self.basis.table

    def energy(self, c: np.ndarray) -> float:
        u = self.field_values(c)
        quad = 0.5 * float(np.real(np.conj(c) @ self.A @ c))
        return quad + 0.5 * self.rp.g0 * float(np.sum(np.abs(u) ** 4)) * self.basis.grid.weight

    def breakdown(self, c: np.ndarray) -> EnergyBreakdown:
        u = self.field_values(c)
        m1 = float(np.real(np.conj(c) @ self.X1 @ c))
        m2 = float(np.real(np.conj(c) @ self.X2 @ c))
        quartic = float(np.sum(np.abs(u) ** 4)) * self.basis.grid.weight
        return energy_from_moments(m1, m2, quartic, self.rp)

    def gradient(self, c: np.ndarray) -> Tuple[np.ndarray, float, np.ndarray]:
        """(F, λ, r)"""
        F = 0.5 * (self.A @ c)
        if self.rp.g0 > 0.0:
            u = self.field_values(c)
            F = F + self.rp.g0 * self.basis.analyze(np.abs(u) ** 2 * u)
        lam = float(np.real(np.vdot(c, F)))
        return F, lam, F - lam * c


def _unit(c: np.ndarray) -> np.ndarray:
    return c / np.linalg.norm(c)


def descend(
    functional: _Functional, c0: np.ndarray, opts: SolverOptions
) -> Tuple[np.ndarray, List[float], int, float, float, bool]:
    """
    한 시작점에서의 사영 경사 하강

    Returns:
        (c, 에너지 이력, 반복 수, grad_norm, λ, converged)
    """
    factor = SOLVER_SETTINGS["armijo_factor"]
    slope = SOLVER_SETTINGS["armijo_slope"]
    min_step, max_step = SOLVER_SETTINGS["min_step"], SOLVER_SETTINGS["max_step"]

    c = _unit(np.asarray(c0, dtype=np.complex128))
    E = functional.energy(c)
    _, lam, r = functional.gradient(c)
    grad_norm = float(np.linalg.norm(r))
    history = [E]
    step = opts.initial_step
    prev_c, prev_r = None, None

    for it in range(1, opts.max_iter + 1):
        if grad_norm < opts.tolerance * max(1.0, E):
            return c, history, it - 1, grad_norm, lam, True

        if prev_c is not None:
            s, y = c - prev_c, r - prev_r
            sy = float(np.real(np.vdot(s, y)))
            if sy > 0.0:
                step = float(np.real(np.vdot(s, s))) / sy
        step = min(max(step, min_step), max_step)

        # 방향 −r 의 방향 미분은 −2‖r‖²
        descent = 2.0 * grad_norm**2
        for _ in range(SOLVER_SETTINGS["max_backtracks"]):
            trial = _unit(c - step * r)
            E_trial = functional.energy(trial)
            if E_trial <= E - slope * step * descent:
                break
            step *= factor
        else:
            logger.warning(f"역추적 실패: it={it}, step={step:.3e}, grad_norm={grad_norm:.3e}")
            return c, history, it - 1, grad_norm, lam, False

        prev_c, prev_r = c, r
        c, E = trial, E_trial
        _, lam, r = functional.gradient(c)
        grad_norm = float(np.linalg.norm(r))
        history.append(E)

    converged = grad_norm < opts.tolerance * max(1.0, E)
    return c, history, opts.max_iter, grad_norm, lam, converged


def _quadratic_ground(functional: _Functional, squeeze: float, seed: int) -> MinimizerResult:
    """g₀=0: ½A 의 최소 고유벡터"""
    values, vectors = eigh(0.5 * functional.A)
    c = _unit(vectors[:, 0].astype(np.complex128))
    _, lam, r = functional.gradient(c)
    energy = functional.breakdown(c)
    logger.info(f"이차 문제 고유값 해: E={values[0]:.12g}")
    return MinimizerResult(
        coeffs=FockCoefficients(c, squeeze),
        energy=energy,
        iterations=0,
        grad_norm=float(np.linalg.norm(r)),
        converged=True,
        seed=seed,
        multiplier=lam,
        history=(energy.total,),
        restart_energies=(energy.total,),
    )


def warm_start(rp: ReducedParams, grid: Grid2D, N: int, squeeze: float) -> FockCoefficients:
    """
    약한/중간 영역: 세타 격자 시험함수 Π₀(u_j ρ)
    강한 영역: Π₀(ρ(x₁)δ(x₂))
    시험함수를 만들 수 없으면 ψ_0 로 시작한다.
    """
    regime = classify_regime(rp)
    try:
        if regime.is_strong:
            return project_lll(strong_test_function(rp, grid), N, squeeze).normalized()
        c, _ = weak_ansatz(rp, LatticeTau.hexagonal(), grid, N, squeeze)
        return c
    except AnisotrapError as e:
        logger.warning(f"{regime.tag} 시작점 생성 실패, ψ_0 로 시작합니다: {e}")
        return FockCoefficients.unit(0, N, squeeze)


def _restart_point(c: np.ndarray, seed: int, restart: int, restarts: int) -> np.ndarray:
    """
    0 번은 따뜻한 시작점, 마지막 번(restarts ≥ 2)은 따뜻한 시작점과 무관한 복소 가우스 무작위 계수,
    나머지는 따뜻한 시작점의 작은 섭동
    """
    if restart == 0:
        return c
    rng = np.random.default_rng(seed + restart)
    xi = rng.standard_normal(c.size) + 1j * rng.standard_normal(c.size)
    if restart == restarts - 1:
        return _unit(xi)
    return _unit(c + SOLVER_SETTINGS["restart_noise"] * xi / np.linalg.norm(xi))


def _check_coverage(grid: Grid2D, N: int, squeeze: float) -> None:
    a, b = basis_semi_axes(N, squeeze)
    if min(-grid.x1_min, grid.x1_max) < a + 0.5 * KERNEL_REACH or min(-grid.x2_min, grid.x2_max) < b + 0.5 * KERNEL_REACH:
        logger.warning(
            f"격자가 기저 타원 (반축 {a:.2f}, {b:.2f}) 을 다 덮지 못합니다: 상위 기저 함수의 질량이 잘립니다"
        )


def minimize_energy(rp: ReducedParams, N: int, opts: SolverOptions) -> MinimizerResult:
    """
    Raises:
        InvalidParameterError: N < 4
    """
    if N < MIN_DEGREE:
        raise InvalidParameterError(f"기저 차수 N={N} 는 {MIN_DEGREE} 이상이어야 합니다")
    logger.info("--minimize START--")

    if opts.warm_start is not None:
        squeeze = opts.warm_start.squeeze
        if opts.warm_start.N != N:
            raise InvalidParameterError(f"시작 계수 차수 {opts.warm_start.N} 가 N={N} 과 다릅니다")
    else:
        squeeze = opts.squeeze if opts.squeeze is not None else lll_squeeze(rp, N) if rp.g0 > 0 else 1.0
    _check_coverage(opts.grid, N, squeeze)

    functional = _Functional(get_basis(N, opts.grid, squeeze), rp)
    if rp.g0 == 0.0:
        result = _quadratic_ground(functional, squeeze, opts.seed)
        logger.info("--minimize END--")
        return result

    start = opts.warm_start if opts.warm_start is not None else warm_start(rp, opts.grid, N, squeeze)
    starts = [_restart_point(start.c, opts.seed, r, opts.restarts) for r in range(opts.restarts)]
    n_jobs = opts.n_jobs if opts.n_jobs is not None else get_settings().n_jobs
    runs = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(descend)(functional, c0, opts) for c0 in starts)

    energies = tuple(history[-1] for _, history, *_ in runs)
    best = int(np.argmin(energies))
    c, history, iterations, grad_norm, lam, converged = runs[best]
    coeffs = FockCoefficients(c, squeeze)
    energy = functional.breakdown(c)
    warn_truncation(coeffs, "minimize_energy")

    floor = rp.kappa**2 / (8 * np.pi)
    if energy.total < floor - 1e-8:
        logger.warning(f"최소 에너지 {energy.total:.10g} 가 하한 κ²/8π={floor:.10g} 보다 작습니다 (격자 부족)")
    if not converged:
        logger.warning(f"수렴 실패: {iterations} 회, grad_norm={grad_norm:.3e}")
    logger.info(
        f"최소화 결과: E={energy.total:.12g}, 반복={iterations}, grad_norm={grad_norm:.3e}, "
        f"재시작 에너지={[f'{e:.10g}' for e in energies]}"
    )
    logger.info("--minimize END--")
    return MinimizerResult(
        coeffs=coeffs,
        energy=energy,
        iterations=iterations,
        grad_norm=grad_norm,
        converged=converged,
        seed=opts.seed,
        multiplier=lam,
        history=tuple(history),
        restart_energies=energies,
    )


def euler_lagrange_residual(result: MinimizerResult, rp: ReducedParams, grid: Grid2D) -> float:
    """‖Π_N(Hu + g₀|u|²u) − λu‖"""
    functional = _Functional(get_basis(result.coeffs.N, grid, result.coeffs.squeeze), rp)
    _, _, r = functional.gradient(result.coeffs.c)
    return float(np.linalg.norm(r))
