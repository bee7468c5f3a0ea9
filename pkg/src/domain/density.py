"""目標密度の実装。

不一致度の計算とパッチ内の点配置で使う密度を提供します:
- UniformTarget: 定数密度(既定はルベーグ測度そのもの)
- HalfSpaceTarget: 超平面 {x₁ = 0} の両側で密度 c と 2 − c を持つ弱極限
- DensityField: [0,1]^d 上の m×…×m 格子の区分定数密度 ρ
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce

import numpy as np

from src.domain.errors import InvalidParameterError
from src.domain.models import Box


def _interval_overlaps(lo: float, hi: float, edges: np.ndarray) -> np.ndarray:
    """区間 [lo, hi] と各格子区間 [edges[i], edges[i+1]] の重なりの長さ。"""
    return np.clip(np.minimum(hi, edges[1:]) - np.maximum(lo, edges[:-1]), 0.0, None)


@dataclass(frozen=True)
class UniformTarget:
    """定数密度の目標測度。

    Attributes:
        density: 密度(既定 1.0 でルベーグ測度)

    Examples:
        >>> UniformTarget().integrate_box(Box((0.0, 0.0), (0.5, 0.2)))
        0.1
    """

    density: float = 1.0

    def __post_init__(self) -> None:
        if self.density <= 0:
            msg = f"密度は正である必要がありますが、{self.density}が指定されました"
            raise InvalidParameterError(msg)

    def integrate_box(self, box: Box) -> float:
        return self.density * box.volume


@dataclass(frozen=True)
class HalfSpaceTarget:
    """H⁺ = {x_axis ≥ 0} で密度 c、H⁻ で密度 2 − c の目標測度。

    半空間ネットの正規化計数測度が弱収束する先の測度です。
    """

    c: float
    axis: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.c < 2:  # noqa: PLR2004
            msg = f"c は (0, 2) の範囲内である必要がありますが、{self.c}が指定されました"
            raise InvalidParameterError(msg)

    def integrate_box(self, box: Box) -> float:
        lo = box.lo[self.axis]
        hi = box.hi[self.axis]
        cross_section = box.volume / (hi - lo)
        positive = max(0.0, hi - max(lo, 0.0))
        negative = max(0.0, min(hi, 0.0) - lo)
        return cross_section * (self.c * positive + (2.0 - self.c) * negative)


@dataclass(frozen=True, eq=False)
class DensityField:
    """[0,1]^d 上の区分定数密度 ρ。

    格子の値は生成時に平均 1(すなわち ∫ρ d𝓛 = 1)となるよう正規化されます。
    パッチの点数配分に使うセル質量は、有理数で厳密に計算されます。

    Attributes:
        grid: 形状 (m, …, m) の正の値を持つ d 次元配列

    Examples:
        >>> field = DensityField.checkerboard(dim=2, m=2, low=0.5, high=1.5)
        >>> field.grid.tolist()
        [[0.5, 1.5], [1.5, 0.5]]
    """

    grid: np.ndarray

    def __post_init__(self) -> None:
        """格子を検証し、平均が 1 になるよう正規化します。

        Raises:
            InvalidParameterError: 格子が立方でない、または値が正でない場合
        """
        grid = np.array(self.grid, dtype=np.float64, copy=True)
        if grid.ndim == 0 or len(set(grid.shape)) != 1 or grid.shape[0] == 0:
            msg = f"密度の格子は m×…×m の形状である必要があります: {grid.shape}"
            raise InvalidParameterError(msg)
        if not np.all(np.isfinite(grid)) or np.min(grid) <= 0:
            msg = "密度の値は正の有限値である必要があります"
            raise InvalidParameterError(msg)
        grid = grid / grid.mean()
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def uniform(cls, dim: int) -> "DensityField":
        """ρ ≡ 1 を返します。"""
        return cls(grid=np.ones((1,) * dim))

    @classmethod
    def checkerboard(cls, dim: int, m: int, low: float, high: float) -> "DensityField":
        """添字の和の偶奇で low / high を交互に置いた市松模様の密度を返します。"""
        if m <= 0:
            msg = f"格子の分割数は正である必要がありますが、{m}が指定されました"
            raise InvalidParameterError(msg)
        parity = np.indices((m,) * dim).sum(axis=0) % 2
        return cls(grid=np.where(parity == 0, low, high))

    @classmethod
    def from_grid(cls, grid: np.ndarray | list) -> "DensityField":
        return cls(grid=np.asarray(grid, dtype=np.float64))

    @property
    def dim(self) -> int:
        return self.grid.ndim

    @property
    def resolution(self) -> int:
        return self.grid.shape[0]

    @property
    def total_mass(self) -> float:
        """∫ρ d𝓛(正規化後は 1)。"""
        return float(self.grid.sum()) / self.resolution**self.dim

    @cached_property
    def _exact_values(self) -> dict[tuple[int, ...], Fraction]:
        """正規化前の比率を保った有理数の格子値(総和で割って質量 1 にする)。"""
        raw = {index: Fraction(float(value)) for index, value in np.ndenumerate(self.grid)}
        total = sum(raw.values(), Fraction(0))
        return {index: value / total for index, value in raw.items()}

    def integrate_box(self, box: Box) -> float:
        """箱と [0,1]^d の共通部分上の ∫ρ d𝓛 を返します。"""
        if box.dim != self.dim:
            msg = f"箱の次元 {box.dim} が密度の次元 {self.dim} と一致しません"
            raise InvalidParameterError(msg)
        edges = np.linspace(0.0, 1.0, self.resolution + 1)
        overlaps = [
            _interval_overlaps(lo, hi, edges) for lo, hi in zip(box.lo, box.hi, strict=True)
        ]
        weights = reduce(np.multiply.outer, overlaps)
        return float(np.sum(self.grid * weights))

    def cell_masses(self, cells_per_axis: int) -> dict[tuple[int, ...], Fraction]:
        """[0,1]^d を cells_per_axis^d 個の等しい小立方体に分けたときの厳密な質量。

        Args:
            cells_per_axis: 各軸の分割数 m_k

        Returns:
            セル添字(辞書式)から質量への辞書。質量の総和はちょうど 1
        """
        if cells_per_axis <= 0:
            msg = f"分割数は正である必要がありますが、{cells_per_axis}が指定されました"
            raise InvalidParameterError(msg)
        m = self.resolution
        # overlap[a][i] = |[a/k, (a+1)/k] ∩ [i/m, (i+1)/m]|
        overlap = [
            [
                max(
                    Fraction(0),
                    min(Fraction(a + 1, cells_per_axis), Fraction(i + 1, m))
                    - max(Fraction(a, cells_per_axis), Fraction(i, m)),
                )
                * m
                for i in range(m)
            ]
            for a in range(cells_per_axis)
        ]
        values = self._exact_values
        masses: dict[tuple[int, ...], Fraction] = {}
        for cell in itertools.product(range(cells_per_axis), repeat=self.dim):
            mass = Fraction(0)
            for index, value in values.items():
                weight = value
                for axis, a in enumerate(cell):
                    weight *= overlap[a][index[axis]]
                    if weight == 0:
                        break
                mass += weight
            masses[cell] = mass
        return masses
