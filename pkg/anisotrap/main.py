"""
anisotrap 명령행 진입점

    python -m anisotrap.main run --config anisotrap/scenarios/figure1.toml --seed 0 --out runs

결과는 JSON 으로 표준 출력에, 로그는 표준 에러와 로그 파일에 남는다.
"""

import argparse
import os
import sys
from typing import List, Optional

import orjson
from dotenv import load_dotenv
from pydantic import ValidationError

from anisotrap.core.constant import EXIT_IO, EXIT_NOT_CONVERGED, EXIT_OK, TAU_MAX_REFINE
from anisotrap.core.errors import AnisotrapError, InvalidConfigError
from anisotrap.pipeline.outputs import write_json
from anisotrap.pipeline.scenario import bounds, classify, derive, load_scenario, minimize, run_sweep
from anisotrap.tools.energy.bounds import thomas_fermi
from anisotrap.tools.energy.models import gp_energy_map, reduced_params
from anisotrap.tools.symplectic.params import TrapParams, derive_parameters
from anisotrap.tools.symplectic.reduction import reduction_report
from anisotrap.tools.theta.lattice import gamma_scan, optimize_tau
from utils.logger import get_logger

load_dotenv()
logger = get_logger(__name__)


def _emit(obj) -> None:
    sys.stdout.write(orjson.dumps(obj, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY).decode())
    sys.stdout.write("\n")


def _add_trap_args(parser: argparse.ArgumentParser) -> None:
    # ω, ν, ε(또는 ε²) 중 두 개
    parser.add_argument("--omega", type=float)
    parser.add_argument("--nu", type=float)
    parser.add_argument("--eps", type=float)
    parser.add_argument("--eps-sq", dest="eps_sq", type=float)
    parser.add_argument("--g", type=float, default=1.0)


def _trap_from_args(args) -> TrapParams:
    return TrapParams.from_inputs(omega=args.omega, nu=args.nu, eps=args.eps, g=args.g, eps_sq=args.eps_sq)


def cmd_derive_params(args) -> int:
    p = _trap_from_args(args)
    dp = derive_parameters(p)
    out = {"trap": p.model_dump(), "derived": dp.model_dump(exclude={"trap"})}
    if p.eps > 0.0:
        rp = reduced_params(p)
        out["reduced"] = rp.model_dump()
        out["regime"] = classify(rp).model_dump()
    _emit(out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    p = _trap_from_args(args)
    report = reduction_report(p, samples=args.samples, seed=args.seed)
    residuals = {k: v for k, v in report.items() if k not in ("mu1", "mu2")}
    worst = max(residuals.values())
    _emit({**report, "max_residual": worst, "tol": args.tol, "passed": worst < args.tol})
    return EXIT_OK


def cmd_gamma_scan(args) -> int:
    table = gamma_scan(args.grid, args.tau_real)
    tau, b = optimize_tau(n_grid=args.grid, refine=args.refine, tau_real=args.tau_real)
    _emit(
        {
            "scan": table.to_dict(orient="records"),
            "optimum": {"tau_real": tau.tau_real, "tau_imag": tau.tau_imag, "gamma": b},
        }
    )
    return EXIT_OK


def cmd_bounds(args) -> int:
    if args.config:
        _, dp, rp = derive(load_scenario(args.config))
    else:
        p = _trap_from_args(args)
        dp, rp = derive_parameters(p), reduced_params(p)
    regime = classify(rp)
    energies = bounds(rp, regime)
    tf = thomas_fermi(rp)
    _emit(
        {
            "reduced": rp.model_dump(),
            "regime": regime.model_dump(),
            "energies": energies,
            "energies_gp": {k: gp_energy_map(v, dp) for k, v in energies.items()},
            "thomas_fermi": {"R1": tf.R1, "R2": tf.R2},
        }
    )
    return EXIT_OK


def cmd_minimize(args) -> int:
    cfg = load_scenario(args.config)
    _, dp, rp = derive(cfg)
    result = minimize(rp, cfg, args.seed)
    out = {"name": cfg.name, **result.to_dict(), "energy_gp": gp_energy_map(result.energy.total, dp)}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        c = result.coeffs.c
        coeffs = {"coeffs_real": c.real.tolist(), "coeffs_imag": c.imag.tolist()}
        write_json({**out, **coeffs}, os.path.join(args.out, "minimizer.json"))
    _emit(out)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_run(args) -> int:
    configs = [load_scenario(path) for path in args.config]
    manifests = run_sweep(configs, seed=args.seed, out_dir=args.out, n_jobs=args.jobs)
    _emit(manifests[0] if len(manifests) == 1 else manifests)
    if not all(m["converged"] for m in manifests):
        logger.warning("수렴하지 않은 시나리오가 있습니다 (파일은 출력됨)")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anisotrap", description="비등방 회전 트랩 LLL 에너지 계산")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive-params", help="파생 파라미터를 JSON 으로 출력")
    _add_trap_args(p)
    p.set_defaults(func=cmd_derive_params)

    p = sub.add_parser("reduce", help="축약 사상 잔차 보고서")
    _add_trap_args(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gamma-scan", help="γ(τ) 스캔과 최소점")
    p.add_argument("--grid", type=int, default=16)
    p.add_argument("--refine", type=int, default=TAU_MAX_REFINE)
    p.add_argument("--tau-real", dest="tau_real", type=float)
    p.set_defaults(func=cmd_gamma_scan)

    p = sub.add_parser("bounds", help="TF 하한, 약한 영역 괄호 또는 강한 영역 점근값")
    p.add_argument("--config")
    _add_trap_args(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("minimize", help="시나리오의 최소화 단계만 실행")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("run", help="전체 파이프라인 실행 (--config 반복 시 sweep)")
    p.add_argument("--config", action="append", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.info(f"--ANISOTRAP {args.command} START--")
    try:
        code = args.func(args)
    except AnisotrapError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code
    except ValidationError as e:
        err = InvalidConfigError(str(e))
        logger.error(f"입력 검증 실패: {e}")
        sys.stderr.write(f"error: {err}\n")
        return err.exit_code
    except OSError as e:
        logger.error(f"입출력 실패: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_IO
    logger.info(f"--ANISOTRAP {args.command} END-- (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
