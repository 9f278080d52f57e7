"""
격자와 복소 필드 운반체
모든 필드는 [i1, i2] (ij 인덱싱) 순서로 저장하며, 셀 중심(midpoint) 격자를 사용한다.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np

from .constant import MIN_GRID_POINTS
from .errors import GridError


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid2D:
    x1_min: float
    x1_max: float
    n1: int
    x2_min: float
    x2_max: float
    n2: int

    def __post_init__(self):
        if self.n1 < MIN_GRID_POINTS or self.n2 < MIN_GRID_POINTS:
            raise GridError(f"격자 점 수는 {MIN_GRID_POINTS} 이상이어야 합니다: ({self.n1}, {self.n2})")
        if not (self.x1_max > self.x1_min and self.x2_max > self.x2_min):
            raise GridError("격자 범위가 비어 있습니다")

    @classmethod
    def symmetric(cls, half_width: float, n: int, half_width2: float = None, n2: int = None) -> "Grid2D":
        """[-L1, L1] x [-L2, L2] 대칭 격자"""
        half_width2 = half_width if half_width2 is None else half_width2
        n2 = n if n2 is None else n2
        return cls(-half_width, half_width, n, -half_width2, half_width2, n2)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def h1(self) -> float:
        return (self.x1_max - self.x1_min) / self.n1

    @property
    def h2(self) -> float:
        return (self.x2_max - self.x2_min) / self.n2

    @property
    def weight(self) -> float:
        return self.h1 * self.h2

    @cached_property
    def x1(self) -> np.ndarray:
        return self.x1_min + (np.arange(self.n1) + 0.5) * self.h1

    @cached_property
    def x2(self) -> np.ndarray:
        return self.x2_min + (np.arange(self.n2) + 0.5) * self.h2

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    def z(self) -> np.ndarray:
        X1, X2 = self.mesh()
        return X1 + 1j * X2

    def require_power_of_two(self) -> None:
        if not (is_power_of_two(self.n1) and is_power_of_two(self.n2)):
            raise GridError(
                f"FFT 파이프라인은 2의 거듭제곱 격자만 허용합니다: ({self.n1}, {self.n2})"
            )

    def integrate(self, values: np.ndarray) -> complex:
        return np.sum(values) * self.weight

    def to_dict(self) -> dict:
        return {
            "x1_min": self.x1_min,
            "x1_max": self.x1_max,
            "n1": self.n1,
            "x2_min": self.x2_min,
            "x2_max": self.x2_max,
            "n2": self.n2,
        }


@dataclass(frozen=True)
class ComplexField:
    values: np.ndarray
    grid: Grid2D
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != self.grid.shape:
            raise GridError(f"필드 shape {values.shape} 가 격자 {self.grid.shape} 와 다릅니다")
        object.__setattr__(self, "values", values)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.density) * self.grid.weight))

    def inner(self, other: "ComplexField") -> complex:
        """<self, other> = ∫ self · conj(other)"""
        return complex(np.sum(self.values * np.conj(other.values)) * self.grid.weight)

    def normalized(self) -> "ComplexField":
        n = self.norm()
        if n == 0.0 or not np.isfinite(n):
            raise GridError("영(0) 또는 비유한 필드는 정규화할 수 없습니다")
        return self.with_values(self.values / n)

    def with_values(self, values: np.ndarray) -> "ComplexField":
        return ComplexField(values, self.grid, dict(self.meta))

    def boundary_mass_fraction(self) -> float:
        d = self.density
        edge = np.zeros_like(d, dtype=bool)
        edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
        total = d.sum()
        return float(d[edge].sum() / total) if total > 0 else 0.0
