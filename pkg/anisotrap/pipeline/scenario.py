"""
시나리오 실행: derive → classify → bounds → minimize → detect_vortices → emit
"""

import math
import os
import time
from typing import List, Literal, Optional, Tuple

import toml
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from sqlalchemy.exc import SQLAlchemyError

import anisotrap
from anisotrap.core.constant import (
    BOUNDS,
    CLASSIFY,
    DERIVE,
    DETECT_VORTICES,
    EMIT,
    MANIFEST_JSON,
    MINIMIZE,
    OUTPUT_FORMATS,
    SOLVER_SETTINGS,
)
from anisotrap.core.errors import InsufficientZerosError, InvalidConfigError, ZeroCountError
from anisotrap.core.grid import Grid2D
from anisotrap.core.settings import get_settings
from anisotrap.core.state import RunManifest, default_run_manifest
from anisotrap.tools.energy.bounds import thomas_fermi, tf_lower_bound, weak_bracket
from anisotrap.tools.energy.models import ReducedParams, Regime, classify_regime, gp_energy_map, reduced_params
from anisotrap.tools.energy.strong import strong_asymptote
from anisotrap.tools.fock.basis import get_basis
from anisotrap.tools.minimizer.descent import MinimizerResult, SolverOptions, minimize_energy
from anisotrap.tools.minimizer.vortices import LatticeStats, VortexSet, detect_vortices, lattice_stats
from anisotrap.tools.symplectic.params import DerivedParams, TrapParams, derive_parameters
from db.crud import save_run
from utils.logger import get_logger

from .outputs import emit_outputs, write_manifest

logger = get_logger(__name__)


class TrapSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega: Optional[float] = Field(default=None, description="회전 진동수 ω")
    nu: Optional[float] = Field(default=None, description="비등방 ν")
    eps: Optional[float] = Field(default=None, description="잔여 가둠 ε")
    eps_sq: Optional[float] = Field(default=None, description="ε² (eps 대신)")
    g: float = Field(default=1.0, gt=0.0, description="결합 상수")

    def to_params(self) -> TrapParams:
        return TrapParams.from_inputs(omega=self.omega, nu=self.nu, eps=self.eps, g=self.g, eps_sq=self.eps_sq)


class SolverSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree: int = Field(default=120, ge=4, description="기저 차수 N")
    n1: int = Field(default=256, ge=8)
    n2: int = Field(default=256, ge=8)
    half_width1: float = Field(default=11.0, gt=0.0, description="x₁ 반폭")
    half_width2: float = Field(default=9.0, gt=0.0, description="x₂ 반폭")
    squeeze: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    tolerance: float = Field(default=SOLVER_SETTINGS["tolerance"], gt=0.0)
    max_iter: int = Field(default=SOLVER_SETTINGS["max_iter"], ge=1)
    seed: int = Field(default=0, ge=0)
    restarts: int = Field(default=SOLVER_SETTINGS["restarts"], ge=1)
    initial_step: float = Field(default=SOLVER_SETTINGS["initial_step"], gt=0.0)

    def grid(self) -> Grid2D:
        return Grid2D.symmetric(self.half_width1, self.n1, self.half_width2, self.n2)

    def options(self, seed: Optional[int] = None) -> SolverOptions:
        return SolverOptions(
            grid=self.grid(),
            squeeze=self.squeeze,
            tolerance=self.tolerance,
            max_iter=self.max_iter,
            restarts=self.restarts,
            initial_step=self.initial_step,
            seed=self.seed if seed is None else seed,
        )


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = Field(default="runs")
    formats: List[Literal["csv", "gnuplot", "json"]] = Field(default_factory=lambda: list(OUTPUT_FORMATS))
    record_history: bool = Field(default=False, description="실행 기록을 DB 에 저장")


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1)
    trap: TrapSection
    solver: SolverSection = Field(default_factory=SolverSection)
    output: OutputSection = Field(default_factory=OutputSection)


def load_scenario(path: str) -> ScenarioConfig:
    """
    Raises:
        InvalidConfigError: 파일/TOML/스키마 오류
        InvalidParameterError: 트랩 제약 위반
    """
    try:
        raw = toml.load(path)
    except (OSError, toml.TomlDecodeError) as e:
        logger.error(f"시나리오 파일 읽기 실패 ({path}): {e}")
        raise InvalidConfigError(f"시나리오 파일을 읽을 수 없습니다 ({path}): {e}") from e
    raw.setdefault("name", os.path.splitext(os.path.basename(path))[0])
    try:
        cfg = ScenarioConfig(**raw)
    except ValidationError as e:
        logger.error(f"시나리오 검증 실패 ({path}): {e}")
        raise InvalidConfigError(f"시나리오 설정이 올바르지 않습니다 ({path}): {e}") from e
    cfg.trap.to_params()
    return cfg


def derive(cfg: ScenarioConfig) -> Tuple[TrapParams, DerivedParams, ReducedParams]:
    logger.info(f"--{DERIVE.upper()} START--")
    p = cfg.trap.to_params()
    dp = derive_parameters(p)
    rp = reduced_params(p)
    logger.info(f"축약 파라미터: ε={rp.eps:.6g}, κ={rp.kappa:.6g}, g₀={rp.g0:.6g}")
    return p, dp, rp


def classify(rp: ReducedParams) -> Regime:
    logger.info(f"--{CLASSIFY.upper()} START--")
    regime = classify_regime(rp)
    logger.info(f"영역: {regime.tag} (κ/ε^(1/3)={regime.ratio:.4f})")
    return regime


def bounds(rp: ReducedParams, regime: Regime) -> dict:
    """약한 영역이면 lower/upper, 강한 영역이면 asymptote/floor"""
    logger.info(f"--{BOUNDS.upper()} START--")
    energies = {"floor": rp.kappa**2 / (8 * math.pi)}
    if rp.g0 > 0.0:
        energies["tf_lower"] = tf_lower_bound(rp)
    if regime.is_weak and rp.g0 > 0.0:
        energies["lower"], energies["upper"] = weak_bracket(rp)
    elif regime.is_strong and rp.g0 > 0.0:
        energies["asymptote"], _ = strong_asymptote(rp)
    logger.info(f"에너지 기준값: {energies}")
    return energies


def minimize(rp: ReducedParams, cfg: ScenarioConfig, seed: Optional[int]) -> MinimizerResult:
    logger.info(f"--{MINIMIZE.upper()} START--")
    return minimize_energy(rp, cfg.solver.degree, cfg.solver.options(seed))


def vortices_and_stats(
    result: MinimizerResult, rp: ReducedParams, grid: Grid2D
) -> Tuple[VortexSet, Optional[LatticeStats]]:
    logger.info(f"--{DETECT_VORTICES.upper()} START--")
    region = None
    if rp.g0 > 0.0:
        tf = thomas_fermi(rp)
        margin = get_settings().bulk_margin
        region = lambda x1, x2: tf.contains(x1, x2, margin)  # noqa: E731
    try:
        v = detect_vortices(result.coeffs, grid, bulk_region=region)
    except ZeroCountError as e:
        logger.error(f"영점 목록을 버립니다: {e}")
        v = VortexSet.empty()
    try:
        stats = lattice_stats(v)
    except InsufficientZerosError as e:
        logger.info(f"격자 통계 생략: {e}")
        stats = None
    return v, stats


def build_report(
    cfg: ScenarioConfig,
    rp: ReducedParams,
    dp: DerivedParams,
    regime: Regime,
    energies: dict,
    result: MinimizerResult,
    v: VortexSet,
    stats: Optional[LatticeStats],
) -> dict:
    report = {
        "name": cfg.name,
        "omega": dp.trap.omega,
        "nu": dp.trap.nu,
        "eps": rp.eps,
        "kappa": rp.kappa,
        "g": dp.trap.g,
        "g0": rp.g0,
        "regime": regime.tag,
        "ratio": regime.ratio,
        "N": result.coeffs.N,
        "squeeze": result.coeffs.squeeze,
        "energy": result.energy.total,
        "energy_pot_x1": result.energy.pot_x1,
        "energy_pot_x2": result.energy.pot_x2,
        "energy_quartic": result.energy.quartic,
        "energy_gp": gp_energy_map(result.energy.total, dp),
        "floor": energies["floor"],
        "tf_lower": energies.get("tf_lower"),
    }
    if regime.is_weak and "lower" in energies:
        report["lower"] = energies["lower"]
        report["upper"] = energies["upper"]
    if "asymptote" in energies:
        report["asymptote"] = energies["asymptote"]
    report.update(
        {
            "converged": result.converged,
            "iterations": result.iterations,
            "grad_norm": result.grad_norm,
            "seed": result.seed,
            "zeros": len(v),
            "bulk_zeros": v.bulk_count,
            "psi6": stats.psi6 if stats else None,
            "nn_mean": stats.nn_mean if stats else None,
            "nn_cv": stats.nn_cv if stats else None,
        }
    )
    return report


def _record(manifest: RunManifest, directory: str) -> None:
    try:
        save_run(manifest, os.path.join(directory, MANIFEST_JSON))
    except SQLAlchemyError:
        # 기록 실패는 실행 결과에 영향을 주지 않는다
        logger.exception("실행 기록 저장 실패")


def run_scenario(cfg: ScenarioConfig, seed: Optional[int] = None, out_dir: Optional[str] = None) -> RunManifest:
    """
    수렴하지 않아도 파일은 모두 출력하고 manifest 의 converged 를 False 로 둔다.

    Raises:
        InvalidParameterError, InvalidConfigError: 입력 오류
        OutputError: 파일 출력 실패
    """
    started = time.perf_counter()
    directory = out_dir if out_dir is not None else os.path.join(cfg.output.directory, cfg.name)
    logger.info(f"--SCENARIO {cfg.name} START-- (출력: {directory})")

    p, dp, rp = derive(cfg)
    regime = classify(rp)
    energies = bounds(rp, regime)
    result = minimize(rp, cfg, seed)
    grid = cfg.solver.grid()
    v, stats = vortices_and_stats(result, rp, grid)

    logger.info(f"--{EMIT.upper()} START--")
    field = get_basis(result.coeffs.N, grid, result.coeffs.squeeze).synthesize(result.coeffs)
    report = build_report(cfg, rp, dp, regime, energies, result, v, stats)
    artifacts = emit_outputs(field, v, report, directory, cfg.output.formats)

    energies = dict(energies, minimum=result.energy.total, minimum_gp=report["energy_gp"])
    manifest = default_run_manifest()
    manifest.update(
        name=cfg.name,
        config=cfg.model_dump(),
        derived={k: v_ for k, v_ in dp.model_dump().items() if k != "trap"},
        reduced=rp.model_dump(),
        regime=regime.model_dump(),
        energies=energies,
        solver=result.to_dict(),
        lattice=stats.model_dump() if stats else None,
        artifacts=artifacts,
        converged=result.converged,
        wall_time=time.perf_counter() - started,
        version=anisotrap.__version__,
    )
    write_manifest(manifest, directory)
    if cfg.output.record_history:
        _record(manifest, directory)
    logger.info(f"--SCENARIO {cfg.name} END-- converged={result.converged}, E={result.energy.total:.10g}")
    return manifest


def run_sweep(
    configs: List[ScenarioConfig],
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
    n_jobs: Optional[int] = None,
) -> List[RunManifest]:
    """시나리오마다 별도 출력 디렉터리 (out_dir/<name>)"""
    names = [cfg.name for cfg in configs]
    if len(set(names)) != len(names):
        raise InvalidConfigError(f"시나리오 이름이 겹칩니다: {names}")
    n_jobs = n_jobs if n_jobs is not None else get_settings().n_jobs

    def target(cfg: ScenarioConfig) -> Optional[str]:
        return os.path.join(out_dir, cfg.name) if out_dir is not None else None

    if len(configs) == 1 or n_jobs == 1:
        return [run_scenario(cfg, seed, target(cfg)) for cfg in configs]
    return Parallel(n_jobs=n_jobs)(delayed(run_scenario)(cfg, seed, target(cfg)) for cfg in configs)
