from typing import List, Optional

from anisotrap.core.state import RunManifest
from db.script.database import SessionLocal
from db.script.models import RunRecord
from utils.logger import get_logger

logger = get_logger(__name__)


def save_run(manifest: RunManifest, manifest_path: str, url: Optional[str] = None) -> int:
    """
    실행 매니페스트 한 건을 이력 테이블에 저장합니다.

    Args:
        manifest: run_scenario 가 돌려준 매니페스트
        manifest_path: manifest.json 경로
        url: DB URL (없으면 설정의 history_url)

    Returns:
        저장된 행의 id
    """
    lattice = manifest.get("lattice") or {}
    record = RunRecord(
        scenario=manifest["name"],
        seed=int(manifest["solver"]["seed"]),
        regime=manifest["regime"]["tag"],
        degree=int(manifest["solver"]["N"]),
        energy=float(manifest["energies"]["minimum"]),
        energy_gp=manifest["energies"].get("minimum_gp"),
        psi6=lattice.get("psi6"),
        converged=bool(manifest["converged"]),
        wall_time=manifest.get("wall_time"),
        version=manifest.get("version"),
        manifest_path=manifest_path,
    )
    db = SessionLocal(url)
    try:
        db.add(record)
        db.commit()
        logger.info(f"실행 기록 저장: {record}")
        return record.id
    except Exception:
        db.rollback()
        raise
    finally:
        db.close()


def list_runs(scenario: Optional[str] = None, limit: int = 50, url: Optional[str] = None) -> List[dict]:
    """
    최근 실행 이력을 조회합니다.

    Args:
        scenario: 시나리오 이름 (없으면 전체)
        limit: 최대 행 수

    Returns:
        최신 순 실행 기록 목록
    """
    db = SessionLocal(url)
    try:
        query = db.query(RunRecord)
        if scenario is not None:
            query = query.filter_by(scenario=scenario)
        rows = query.order_by(RunRecord.created_at.desc(), RunRecord.id.desc()).limit(limit).all()
        return [
            {
                "id": r.id,
                "scenario": r.scenario,
                "seed": r.seed,
                "regime": r.regime,
                "degree": r.degree,
                "energy": r.energy,
                "energy_gp": r.energy_gp,
                "psi6": r.psi6,
                "converged": r.converged,
                "wall_time": r.wall_time,
                "version": r.version,
                "manifest_path": r.manifest_path,
                "created_at": r.created_at.isoformat() if r.created_at else None,
            }
            for r in rows
        ]
    finally:
        db.close()
