"""
소용돌이(영점) 검출과 격자 통계
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import ndimage
from scipy.spatial import Delaunay, cKDTree

from anisotrap.core.constant import (
    BOND_CUTOFF,
    EDGE_SAMPLES,
    KERNEL_BLOCK_ROWS,
    MIN_LATTICE_ZEROS,
    NEWTON_STEPS,
    NEWTON_TOL,
)
from anisotrap.core.errors import InsufficientZerosError, ZeroCountError
from anisotrap.core.grid import ComplexField, Grid2D
from anisotrap.core.settings import get_settings
from anisotrap.tools.fock.basis import FockCoefficients, LLLBasis, get_basis
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class VortexSet:
    """
    positions: (k, 2) 영점 좌표
    winding: 각 영점의 감김수
    bulk_mask: TF 타원(여유 margin) 안쪽 여부
    """

    positions: np.ndarray
    winding: np.ndarray
    bulk_mask: np.ndarray

    @classmethod
    def empty(cls) -> "VortexSet":
        return cls(positions=np.zeros((0, 2)), winding=np.zeros(0, dtype=int), bulk_mask=np.zeros(0, dtype=bool))

    def __len__(self) -> int:
        return int(self.winding.size)

    @property
    def bulk_positions(self) -> np.ndarray:
        return self.positions[self.bulk_mask]

    @property
    def bulk_count(self) -> int:
        return int(np.count_nonzero(self.bulk_mask))

    def to_records(self) -> List[dict]:
        return [
            {"x1": float(p[0]), "x2": float(p[1]), "winding": int(w), "bulk": bool(b)}
            for p, w, b in zip(self.positions, self.winding, self.bulk_mask)
        ]


class LatticeStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    count: int = Field(..., ge=0)
    nn_mean: float
    nn_cv: float = Field(..., ge=0.0)
    psi6: float = Field(..., ge=0.0, le=1.0 + 1e-12, description="결합 6겹 위상 평균의 크기")
    bonds: int = Field(..., ge=0)




def _wrap(delta: np.ndarray) -> np.ndarray:
    return (delta + np.pi) % (2 * np.pi) - np.pi


def _corner_steps(phase: np.ndarray) -> Tuple[np.ndarray, ...]:
    """각 칸의 반시계 방향 꼭짓점 위상 변화 네 개"""
    a, b = phase[:-1, :-1], phase[1:, :-1]
    c, d = phase[1:, 1:], phase[:-1, 1:]
    return _wrap(b - a), _wrap(c - b), _wrap(d - c), _wrap(a - d)


def _valid_cells(mod: np.ndarray, floor: float) -> np.ndarray:
    ok = mod >= floor * mod.max()
    return ok[:-1, :-1] & ok[1:, :-1] & ok[1:, 1:] & ok[:-1, 1:]


def plaquette_winding(values: np.ndarray, floor: float, mod: Optional[np.ndarray] = None) -> np.ndarray:
    """
    격자 점 네 개로 이루어진 각 칸의 감김수 (shape (n1−1, n2−1))
    mod (기본 |values|) 의 네 꼭짓점 중 하나라도 floor·max 미만이면 0.
    """
    winding = np.rint(sum(_corner_steps(np.angle(values))) / (2 * np.pi)).astype(int)
    mod = np.abs(values) if mod is None else mod
    return np.where(_valid_cells(mod, floor), winding, 0)


def boundary_winding(
    entire: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    grid: Grid2D,
    cells: np.ndarray,
    samples: int = EDGE_SAMPLES,
) -> np.ndarray:
    """
    칸 (i, j) 경계를 변당 samples 점으로 나누어 P 의 편각 변화로 센 영점 수 (편각 원리)
    """
    windings = np.zeros(len(cells), dtype=int)
    t = np.arange(samples) / samples
    for start in range(0, len(cells), KERNEL_BLOCK_ROWS):
        block = cells[start : start + KERNEL_BLOCK_ROWS]
        x1a, x2a = grid.x1[block[:, 0], None], grid.x2[block[:, 1], None]
        x1b, x2b = x1a + grid.h1, x2a + grid.h2
        path = np.concatenate(
            [
                x1a + t * grid.h1 + 1j * x2a,
                x1b + 1j * (x2a + t * grid.h2),
                x1b - t * grid.h1 + 1j * x2b,
                x1a + 1j * (x2b - t * grid.h2),
            ],
            axis=1,
        )
        P, _ = entire(path)
        phase = np.angle(P)
        steps = _wrap(np.roll(phase, -1, axis=1) - phase)
        windings[start : start + KERNEL_BLOCK_ROWS] = np.rint(steps.sum(axis=1) / (2 * np.pi)).astype(int)
    return windings


def _entire_winding(basis: LLLBasis, c: FockCoefficients, floor: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    u = P·ψ_0 이고 ψ_0 는 영점이 없으므로 칸마다 P 의 감김수를 센다.
    ψ_0 의 위상 πs·x₁x₂ 는 길게 늘어난 격자에서 칸당 π 를 넘을 수 있다.
    꼭짓점 사이 위상 변화가 π/2 를 넘는 칸은 boundary_winding 으로 다시 센다.

    Returns:
        (칸별 감김수, 격자 위 P)
    """
    grid = basis.grid
    P, _ = basis.entire_values(c, grid.z())
    steps = _corner_steps(np.angle(P))
    winding = np.rint(sum(steps) / (2 * np.pi)).astype(int)
    valid = _valid_cells(np.abs(basis.synthesize(c).values), floor)

    coarse = np.max(np.abs(np.stack(steps)), axis=0) > 0.5 * np.pi
    cells = np.argwhere(valid & coarse)
    if len(cells):
        winding[tuple(cells.T)] = boundary_winding(lambda z: basis.entire_values(c, z), grid, cells)
    return np.where(valid, winding, 0), P


def _linear_zero(values: np.ndarray, grid: Grid2D, i: int, j: int) -> Tuple[float, float]:
    """칸 (i, j) 위에서 값을 선형 근사해 영점을 구한다 (실패하면 칸 중심)"""
    q = values[i : i + 2, j : j + 2]
    x1c = grid.x1[i] + 0.5 * grid.h1
    x2c = grid.x2[j] + 0.5 * grid.h2
    u0 = q.mean()
    d1 = 0.5 * ((q[1, 0] - q[0, 0]) + (q[1, 1] - q[0, 1])) / grid.h1
    d2 = 0.5 * ((q[0, 1] - q[0, 0]) + (q[1, 1] - q[1, 0])) / grid.h2
    jac = np.array([[d1.real, d2.real], [d1.imag, d2.imag]])
    try:
        shift = np.linalg.solve(jac, -np.array([u0.real, u0.imag]))
    except np.linalg.LinAlgError:
        return x1c, x2c
    if abs(shift[0]) > grid.h1 or abs(shift[1]) > grid.h2:
        return x1c, x2c
    return x1c + shift[0], x2c + shift[1]


def _cluster_zeros(winding: np.ndarray, values: np.ndarray, grid: Grid2D) -> Tuple[np.ndarray, np.ndarray]:
    """감김수가 0 이 아닌 칸을 연결 성분으로 묶어 영점 하나로 본다."""
    labels, count = ndimage.label(winding != 0)
    positions, windings = [], []
    merged = 0
    for label in range(1, count + 1):
        cells = np.argwhere(labels == label)
        total = int(winding[labels == label].sum())
        if len(cells) > 1:
            merged += 1
        if total == 0:
            continue
        i, j = cells[np.argmax(np.abs(winding[labels == label]))]
        if len(cells) == 1:
            positions.append(_linear_zero(values, grid, i, j))
        else:
            centroid = cells.mean(axis=0)
            positions.append((grid.x1[0] + (centroid[0] + 0.5) * grid.h1, grid.x2[0] + (centroid[1] + 0.5) * grid.h2))
        windings.append(total)
    if merged:
        logger.warning(f"인접한 감김 칸 {merged} 묶음이 합쳐졌습니다: 격자 해상도가 부족할 수 있습니다")
    return np.array(positions, dtype=float).reshape(-1, 2), np.array(windings, dtype=int)


def field_zeros(field: ComplexField, floor: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    임의 필드의 위상으로 센 영점 (세타 격자 필드 등 다항식 부분이 없는 경우)

    Returns:
        (positions (k, 2), winding (k,))
    """
    floor = get_settings().zero_floor if floor is None else floor
    return _cluster_zeros(plaquette_winding(field.values, floor), field.values, field.grid)


def _newton(z0: np.ndarray, m: np.ndarray, entire: Callable) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """z ← z − m·P/P' 를 NEWTON_STEPS 번 (m 중근에서도 이차 수렴). (z, 마지막 걸음, 멈춤 여부)"""
    z = z0.copy()
    step = np.zeros_like(z)
    stuck = np.zeros(z.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(NEWTON_STEPS):
            P, dP = entire(z)
            ok = np.abs(dP) > 0
            step = np.zeros_like(z)
            step[ok] = m[ok] * P[ok] / dP[ok]
            stuck = ~ok & (P != 0)
            z = z - step
    return z, step, stuck


def _newton_refine(
    positions: np.ndarray,
    winding: np.ndarray,
    entire: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    radius: float,
    tol: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    다항식 부분 P 에 대한 Newton 보정
    마지막 걸음이 tol 이하이고 출발점에서 radius 안에 머문 후보만 받아들인다.
    감김수 m 으로 수렴하지 않으면 (가까운 단순 영점 쌍) m=1 로 한 번 더 시도한다.

    Returns:
        (positions, accepted)
    """
    if positions.size == 0:
        return positions, np.zeros(0, dtype=bool)
    z0 = positions[:, 0] + 1j * positions[:, 1]
    m = np.maximum(np.abs(winding), 1).astype(float)

    def accept(z, step, stuck):
        return np.isfinite(z) & (np.abs(z - z0) <= radius) & (np.abs(step) <= tol) & ~stuck

    z, step, stuck = _newton(z0, m, entire)
    accepted = accept(z, step, stuck)
    retry = ~accepted & (m > 1)
    if retry.any():
        z1, step1, stuck1 = _newton(z0, np.ones_like(m), entire)
        again = retry & accept(z1, step1, stuck1)
        z = np.where(again, z1, z)
        accepted = accepted | again
    z = np.where(accepted, z, z0)
    return np.column_stack([z.real, z.imag]), accepted


def check_degree_bound(winding: np.ndarray, N: int) -> None:
    """
    Raises:
        ZeroCountError: Σ|감김수| > N
    """
    total = int(np.abs(winding).sum())
    if total > N:
        raise ZeroCountError(f"검출한 감김수 합 {total} 가 다항식 차수 N={N} 를 넘습니다")


def detect_vortices(
    c: FockCoefficients,
    grid: Grid2D,
    bulk_region: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
    floor: Optional[float] = None,
) -> VortexSet:
    """
    u = Σ c_k ψ_k 의 영점

    bulk_region(x1, x2) 는 bulk 여부를 돌려준다 (보통 ThomasFermi.contains 에 margin 0.8).

    Raises:
        ZeroCountError: 감김수 합이 N 을 넘는 경우 (영점 목록을 내보내지 않는다)
    """
    floor = get_settings().zero_floor if floor is None else floor
    basis = get_basis(c.N, grid, c.squeeze)
    cell_winding, P = _entire_winding(basis, c, floor)
    positions, winding = _cluster_zeros(cell_winding, P.reshape(grid.shape), grid)

    h = min(grid.h1, grid.h2)
    positions, accepted = _newton_refine(
        positions, winding, lambda z: basis.entire_values(c, z), radius=2.0 * max(grid.h1, grid.h2), tol=NEWTON_TOL * h
    )
    if not accepted.all():
        logger.warning(f"Newton 이 수렴하지 않은 후보 {int((~accepted).sum())} 개를 버립니다")
    positions, winding = positions[accepted], winding[accepted]
    check_degree_bound(winding, c.N)

    if bulk_region is None:
        bulk = np.ones(len(winding), dtype=bool)
    else:
        bulk = np.asarray(bulk_region(positions[:, 0], positions[:, 1]), dtype=bool).reshape(-1)
    vortices = VortexSet(positions=positions, winding=winding, bulk_mask=bulk)
    logger.info(f"소용돌이 검출: 전체 {len(vortices)}, bulk {vortices.bulk_count}")
    return vortices


def lattice_stats(v: VortexSet) -> LatticeStats:
    """
    bulk 영점의 최근접 거리 평균/변동계수와 결합 6겹 위상 |⟨e^{6iθ}⟩|
    결합은 Delaunay 이웃 중 길이가 BOND_CUTOFF·(최근접 거리 중앙값) 이하인 쌍.

    Raises:
        InsufficientZerosError: bulk 영점이 MIN_LATTICE_ZEROS 개 미만
    """
    points = v.bulk_positions
    if len(points) < MIN_LATTICE_ZEROS:
        raise InsufficientZerosError(f"bulk 영점 {len(points)} 개로는 격자 통계를 낼 수 없습니다")

    dist, _ = cKDTree(points).query(points, k=2)
    nn = dist[:, 1]
    cutoff = BOND_CUTOFF * float(np.median(nn))

    tri = Delaunay(points)
    edges = set()
    for simplex in tri.simplices:
        for a in range(3):
            i, j = sorted((int(simplex[a]), int(simplex[(a + 1) % 3])))
            edges.add((i, j))
    edges = np.array(sorted(edges))
    delta = points[edges[:, 1]] - points[edges[:, 0]]
    keep = np.hypot(delta[:, 0], delta[:, 1]) <= cutoff
    angles = np.arctan2(delta[keep, 1], delta[keep, 0])
    psi6 = float(np.abs(np.mean(np.exp(6j * angles)))) if angles.size else 0.0

    stats = LatticeStats(
        count=len(points),
        nn_mean=float(nn.mean()),
        nn_cv=float(nn.std() / nn.mean()),
        psi6=min(psi6, 1.0),
        bonds=int(keep.sum()),
    )
    logger.info(f"격자 통계: {stats.model_dump()}")
    return stats
