"""
실행 결과 파일 출력

- density.csv: x1, x2, density (행 수 = n1·n2)
- density.gnuplot: gnuplot nonuniform matrix (첫 행 = 열 수와 x2 좌표, 이후 각 행 = x1 과 밀도)
- zeros.json: [{x1, x2, winding, bulk}]
- report.json: 평탄한 파라미터/에너지 보고서
- manifest.json: 실행 기록과 파일별 sha256
"""

import hashlib
import os
from typing import Any, Iterable, List

import numpy as np
import orjson
import pandas as pd

from anisotrap.core.constant import (
    DENSITY_CSV,
    DENSITY_GNUPLOT,
    FLOAT_FORMAT,
    MANIFEST_JSON,
    REPORT_JSON,
    ZEROS_JSON,
)
from anisotrap.core.errors import OutputError
from anisotrap.core.grid import ComplexField
from anisotrap.core.state import ArtifactEntry, RunManifest
from anisotrap.tools.minimizer.vortices import VortexSet
from utils.logger import get_logger

logger = get_logger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def artifact_entry(path: str, root: str) -> ArtifactEntry:
    return ArtifactEntry(path=os.path.relpath(path, root), sha256=sha256_of(path), bytes=os.path.getsize(path))


def write_json(obj: Any, path: str) -> str:
    with open(path, "wb") as f:
        f.write(orjson.dumps(obj, option=JSON_OPTIONS))
        f.write(b"\n")
    return path


def write_density_csv(field: ComplexField, path: str) -> str:
    X1, X2 = field.grid.mesh()
    frame = pd.DataFrame({"x1": X1.ravel(), "x2": X2.ravel(), "density": field.density.ravel()})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_density_gnuplot(field: ComplexField, path: str) -> str:
    grid = field.grid
    header = np.concatenate([[grid.n2], grid.x2])
    body = np.column_stack([grid.x1, field.density])
    np.savetxt(path, np.vstack([header, body]), fmt=FLOAT_FORMAT, delimiter=" ")
    return path


def emit_outputs(
    field: ComplexField,
    vortices: VortexSet,
    report: dict,
    directory: str,
    formats: Iterable[str],
) -> List[ArtifactEntry]:
    """
    Raises:
        OutputError: 디렉터리 생성/쓰기 실패
    """
    formats = set(formats)
    try:
        os.makedirs(directory, exist_ok=True)
        paths = []
        if "csv" in formats:
            paths.append(write_density_csv(field, os.path.join(directory, DENSITY_CSV)))
        if "gnuplot" in formats:
            paths.append(write_density_gnuplot(field, os.path.join(directory, DENSITY_GNUPLOT)))
        paths.append(write_json(vortices.to_records(), os.path.join(directory, ZEROS_JSON)))
        paths.append(write_json(report, os.path.join(directory, REPORT_JSON)))
        artifacts = [artifact_entry(p, directory) for p in paths]
    except OSError as e:
        logger.error(f"출력 실패 ({directory}): {e}")
        raise OutputError(f"출력 파일을 쓸 수 없습니다: {e}") from e
    logger.info(f"출력 완료: {[a['path'] for a in artifacts]}")
    return artifacts


def write_manifest(manifest: RunManifest, directory: str) -> str:
    try:
        return write_json(dict(manifest), os.path.join(directory, MANIFEST_JSON))
    except OSError as e:
        logger.error(f"매니페스트 출력 실패 ({directory}): {e}")
        raise OutputError(f"매니페스트를 쓸 수 없습니다: {e}") from e


def load_manifest(directory: str) -> RunManifest:
    try:
        with open(os.path.join(directory, MANIFEST_JSON), "rb") as f:
            return orjson.loads(f.read())
    except (OSError, orjson.JSONDecodeError) as e:
        raise OutputError(f"매니페스트를 읽을 수 없습니다: {e}") from e


def verify_manifest(manifest: RunManifest, directory: str) -> bool:
    """목록의 모든 파일이 존재하고 sha256 이 일치하는지"""
    for entry in manifest["artifacts"]:
        path = os.path.join(directory, entry["path"])
        if not os.path.exists(path) or sha256_of(path) != entry["sha256"]:
            logger.warning(f"체크섬 불일치: {entry['path']}")
            return False
    return True
