from typing import Any, Dict, List, Optional, TypedDict


class ArtifactEntry(TypedDict):
    path: str
    sha256: str
    bytes: int


class RunManifest(TypedDict):
    """
    config: 시나리오 설정 원본 (ScenarioConfig.model_dump)
    derived: 파생 파라미터 (α, μ₁, μ₂, β₁, β₂, γ, λ₁, λ₂, c, d, κ₁, κ, g₀, g₁)
    reduced: 축약 파라미터 (ε, κ, g₀)
    regime: Weak / Intermediate / Strong 와 κ/ε^{1/3}
    energies: 최소 에너지, E_GP 로 옮긴 값, TF 하계, 약한 영역 괄호 또는 강한 영역 점근값
    solver: MinimizerResult.to_dict
    lattice: 격자 통계 (bulk 영점이 부족하면 None)
    artifacts: 출력 파일 목록과 sha256
    converged: 최소화 수렴 여부
    wall_time: 실행 시간(초)
    version: anisotrap 버전
    """

    name: str
    config: Dict[str, Any]
    derived: Dict[str, float]
    reduced: Dict[str, float]
    regime: Dict[str, Any]
    energies: Dict[str, Optional[float]]
    solver: Dict[str, Any]
    lattice: Optional[Dict[str, Any]]
    artifacts: List[ArtifactEntry]
    converged: bool
    wall_time: float
    version: str


def default_run_manifest() -> RunManifest:
    return RunManifest(
        name="",
        config={},
        derived={},
        reduced={},
        regime={},
        energies={},
        solver={},
        lattice=None,
        artifacts=[],
        converged=False,
        wall_time=0.0,
        version="",
    )
