"""密度パッチを持つネットの構成。

整数格子 ℤ^d から立方体 S_k の中身を取り除き、密度 ρ に従って二進的に
配置した点集合 Ξ_k で置き換えます。立方体は第1座標軸に沿って並べ、
隣り合う領域 R_{k−1}, R_k の距離をちょうど ψ(k) にします。
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from src.domain.constants import BALL_TOLERANCE
from src.domain.density import DensityField
from src.domain.errors import (
    IncompleteWindowError,
    InvalidParameterError,
    PreconditionViolatedError,
)
from src.domain.growth import GrowthFunction
from src.domain.models import ExplicitMap, NetWindow
from src.domain.net_core import integer_lattice_window

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cube:
    """軸平行な閉立方体 corner + [0, side]^d。"""

    corner: tuple[float, ...]
    side: float

    def __post_init__(self) -> None:
        if self.side <= 0:
            msg = f"立方体の辺の長さは正である必要があります: {self.side}"
            raise InvalidParameterError(msg)

    @property
    def dim(self) -> int:
        return len(self.corner)

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.corner, dtype=np.float64)

    @property
    def hi(self) -> np.ndarray:
        return self.lo + self.side

    @property
    def diameter(self) -> float:
        return math.sqrt(self.dim) * self.side

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.all((points >= self.lo) & (points <= self.hi), axis=1)

    def distance_to(self, other: "Cube") -> float:
        """2つの立方体のユークリッド距離(交わるなら 0)。"""
        gaps = np.maximum(0.0, np.maximum(other.lo - self.hi, self.lo - other.hi))
        return float(np.sqrt(np.sum(gaps * gaps)))

    def distance_to_origin(self) -> float:
        gaps = np.maximum(0.0, np.maximum(self.lo, -self.hi))
        return float(np.sqrt(np.sum(gaps * gaps)))

    def farthest_corner_norm(self) -> float:
        extent = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return float(np.sqrt(np.sum(extent * extent)))

    def lattice_points(self) -> np.ndarray:
        """ℤ^d ∩ 立方体 を辞書式順で返します。"""
        axes = [
            np.arange(math.ceil(a), math.floor(b) + 1, dtype=np.float64)
            for a, b in zip(self.lo, self.hi, strict=True)
        ]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)


@dataclass(frozen=True)
class DyadicPlacement:
    """1つのパッチへの点配置の結果。

    Attributes:
        points: 配置した点 Ξ_k
        cells_per_axis: 小立方体の各軸の分割数 m_k
        cell_counts: 各小立方体の点数 n_{k,i}(辞書式順)
        cell_targets: 各小立方体の目標値 l_k^d·∫ρ(有理数、辞書式順)
    """

    points: np.ndarray
    cells_per_axis: int
    cell_counts: tuple[int, ...]
    cell_targets: tuple[Fraction, ...]


@dataclass(frozen=True)
class CubeLayout:
    """立方体 U_k, R_k, S_k と点集合 Ξ_k の配置。

    Attributes:
        sides: 辺の長さ l_k(狭義単調増加な正の整数)
        psi_values: ψ(1), …, ψ(k_max)
        regions: R_k = g_ψ(U_k)(U_k = [0, l_k²]^d の平行移動)
        patches: R_k 内の一辺 l_k の立方体 S_k
        placements: 各 S_k への点配置
    """

    sides: tuple[int, ...]
    psi_values: tuple[float, ...]
    regions: tuple[Cube, ...]
    patches: tuple[Cube, ...]
    placements: tuple[DyadicPlacement, ...]

    @property
    def k_max(self) -> int:
        return len(self.sides)

    @property
    def translations(self) -> tuple[tuple[float, ...], ...]:
        """g_ψ の平行移動ベクトル(U_k の原点の行き先)。"""
        return tuple(region.corner for region in self.regions)

    def patch_points(self, k: int) -> np.ndarray:
        """Ξ_k(k は 1 始まり)。"""
        return self.placements[k - 1].points


@dataclass(frozen=True)
class PatchedNet:
    """patched_net の結果。"""

    net: NetWindow
    layout: CubeLayout


def apportion(targets: list[Fraction], total: int) -> list[int]:
    """最大剰余法で総和がちょうど total になる整数配分を返します。

    各値は ⌊target⌋ か ⌊target⌋ + 1 で、剰余が等しい場合は添字の小さい方を優先します。

    Raises:
        PreconditionViolatedError: 床関数の和が total を超える、または
            剰余を配り切れない場合

    Examples:
        >>> apportion([Fraction(25, 4)] * 4, 25)
        [7, 6, 6, 6]
    """
    floors = [math.floor(t) for t in targets]
    remaining = total - sum(floors)
    if remaining < 0 or remaining > len(targets):
        msg = f"配分できません: 床関数の和 {sum(floors)}, 総数 {total}"
        raise PreconditionViolatedError(msg, witness=remaining)
    order = sorted(range(len(targets)), key=lambda i: (-(targets[i] - floors[i]), i))
    for i in order[:remaining]:
        floors[i] += 1
    return floors


def _pot_centers(
    cell_lo: np.ndarray, cell_side: float, count: int, anchor: np.ndarray
) -> np.ndarray:
    """小立方体の中心、続いて順に細かい二進分割の空いた中心を count 個返します。

    同じ分割の中では anchor(S_k の中心)から遠い中心を先に埋め、等距離なら辞書式順です。
    """
    dim = len(cell_lo)
    blocks: list[np.ndarray] = []
    remaining = count
    level = 0
    while remaining > 0:
        parts = 2**level
        step = cell_side / (2 * parts)
        index = np.array(list(itertools.product(range(parts), repeat=dim)), dtype=np.float64)
        centers = cell_lo + (2 * index + 1) * step
        distances = np.round(np.linalg.norm(centers - anchor, axis=1), 9)
        order = np.argsort(-distances, kind="stable")
        blocks.append(centers[order[:remaining]])
        remaining -= min(remaining, len(centers))
        level += 1
    return np.concatenate(blocks).reshape(-1, dim)


def dyadic_placement(rho: DensityField, side: int, patch: Cube) -> DyadicPlacement:
    """一辺 l_k の立方体 S_k に l_k^d 個の点を密度 ρ に従って配置します。

    S_k を m_k^d 個(m_k = ⌊√l_k⌋)の小立方体に分け、l_k^d·∫ρ を最大剰余法で
    丸めた個数を、各小立方体の中心から順に二進分割の中心へ詰めていきます。
    同じ分割の中では S_k の中心から遠い中心を先に埋めます。

    Raises:
        InvalidParameterError: l_k < 1、または S_k の辺の長さが l_k でない場合

    Examples:
        >>> placement = dyadic_placement(DensityField.uniform(2), 4, Cube((0.0, 0.0), 4.0))
        >>> placement.cell_counts
        (4, 4, 4, 4)
    """
    if side < 1 or patch.side != side:
        msg = f"l_k ≥ 1 かつ S_k の辺の長さが l_k である必要があります: l_k={side}, 辺={patch.side}"
        raise InvalidParameterError(msg)
    if rho.dim != patch.dim:
        msg = f"密度の次元 {rho.dim} が立方体の次元 {patch.dim} と一致しません"
        raise InvalidParameterError(msg)

    dim = patch.dim
    total = side**dim
    cells = math.isqrt(side)
    masses = rho.cell_masses(cells)
    keys = sorted(masses)
    targets = [total * masses[key] for key in keys]
    counts = apportion(targets, total)

    cell_side = side / cells
    anchor = (patch.lo + patch.hi) / 2
    blocks = [
        _pot_centers(patch.lo + np.asarray(key) * cell_side, cell_side, count, anchor)
        for key, count in zip(keys, counts, strict=True)
        if count > 0
    ]
    points = np.concatenate(blocks) if blocks else np.empty((0, dim))
    return DyadicPlacement(
        points=points,
        cells_per_axis=cells,
        cell_counts=tuple(counts),
        cell_targets=tuple(targets),
    )


def _largest_half_odd_at_most(value: float) -> float:
    return math.floor(value - 0.5) + 0.5


def _snap_half_odd(value: float) -> float:
    """最も近い (1/2)ℤ∖ℤ の値(等距離なら −∞ 側)。"""
    return math.floor(value) + 0.5 if value % 1.0 else value - 0.5


def layout_violations(layout: CubeLayout) -> list[str]:
    """配置の条件を検査し、違反の説明の一覧を返します(空なら全て成立)。"""
    violations: list[str] = []
    regions = layout.regions
    if not regions[0].contains(np.zeros((1, regions[0].dim)))[0]:
        violations.append("原点が R_1 に含まれていません")
    for k in range(1, layout.k_max + 1):
        region, patch = regions[k - 1], layout.patches[k - 1]
        side = layout.sides[k - 1]
        if k >= 2:  # noqa: PLR2004
            gap = region.distance_to(regions[k - 2])
            if abs(gap - layout.psi_values[k - 1]) > BALL_TOLERANCE:
                psi_k = layout.psi_values[k - 1]
                violations.append(f"dist(R_{k}, R_{k - 1}) = {gap} ≠ ψ({k}) = {psi_k}")
            others = [region.distance_to(r) for j, r in enumerate(regions, start=1) if j != k]
            if min(others) < gap - BALL_TOLERANCE:
                violations.append(f"R_{k} は R_{k - 1} 以外の領域により近くにあります")
        margin = float(min(np.min(patch.lo - region.lo), np.min(region.hi - patch.hi)))
        if margin < side**2 / 4 - BALL_TOLERANCE:
            violations.append(f"dist(S_{k}, ℝ^d∖R_{k}) = {margin} < l_k²/4 = {side**2 / 4}")
        if any((c - 0.5) % 1.0 != 0 for c in patch.corner) or patch.side != side:
            violations.append(f"S_{k} の頂点が (1/2)ℤ^d∖ℤ^d にありません")
        placed = layout.placements[k - 1].points
        if len(placed) != side**patch.dim:
            violations.append(f"|Ξ_{k}| = {len(placed)} ≠ l_k^d = {side**patch.dim}")
        if len(placed) and not np.all(patch.contains(placed)):
            violations.append(f"Ξ_{k} が S_{k} からはみ出しています")
    return violations


def patched_net(
    rho: DensityField,
    sides: list[int],
    psi: GrowthFunction,
    k_max: int | None = None,
    window_radius: float | None = None,
) -> PatchedNet:
    """X(ρ, l, ψ) = ∪_k Ξ_k ∪ (ℤ^d ∖ ∪_k S_k) を窓の中で構成します。

    Args:
        rho: 密度 ρ
        sides: l_1 < l_2 < …(l_1 ≥ 2)
        psi: 領域間の距離 ψ(k)
        k_max: 使う立方体の数(省略時は sides の長さ)
        window_radius: 窓の半径(省略時は全ての R_k を含む最小の半径)

    Returns:
        PatchedNet

    Raises:
        InvalidParameterError: l が条件を満たさない場合
        IncompleteWindowError: 指定された窓に S_k が収まらない場合
        PreconditionViolatedError: 配置の条件が成り立たない場合(witness は違反の一覧)
    """
    count = len(sides) if k_max is None else k_max
    used = [int(s) for s in sides[:count]]
    if count < 1 or len(used) < count:
        msg = f"k_max={count} に対して辺の長さが足りません: {sides}"
        raise InvalidParameterError(msg)
    if used[0] < 2 or any(b <= a for a, b in zip(used, used[1:], strict=False)):  # noqa: PLR2004
        msg = f"l は l_1 ≥ 2 の狭義単調増加な整数列である必要があります: {used}"
        raise InvalidParameterError(msg)

    dim = rho.dim
    psi_values = tuple(psi(float(k)) for k in range(1, count + 1))
    start = _largest_half_odd_at_most(-(used[0] ** 2) / 2)
    regions: list[Cube] = []
    patches: list[Cube] = []
    placements: list[DyadicPlacement] = []
    axis_corner = start
    for k, side in enumerate(used, start=1):
        if k >= 2:  # noqa: PLR2004
            axis_corner = axis_corner + used[k - 2] ** 2 + psi_values[k - 1]
        region = Cube((axis_corner,) + (start,) * (dim - 1), float(side**2))
        inset = (side**2 - side) / 2
        patch = Cube(tuple(_snap_half_odd(c + inset) for c in region.corner), float(side))
        regions.append(region)
        patches.append(patch)
        placements.append(dyadic_placement(rho, side, patch))

    layout = CubeLayout(
        sides=tuple(used),
        psi_values=psi_values,
        regions=tuple(regions),
        patches=tuple(patches),
        placements=tuple(placements),
    )
    violations = layout_violations(layout)
    if violations:
        msg = f"配置の条件が成り立ちません: {violations[0]}"
        raise PreconditionViolatedError(msg, witness=violations)

    enclosing = max(region.farthest_corner_norm() for region in regions)
    radius = enclosing if window_radius is None else window_radius
    needed = max(patch.farthest_corner_norm() for patch in patches)
    if needed > radius + BALL_TOLERANCE:
        msg = f"S_k が窓に収まりません: 必要な半径 {needed} > {radius}"
        raise IncompleteWindowError(msg)

    lattice = integer_lattice_window(dim, radius).points
    outside = np.ones(len(lattice), dtype=bool)
    for patch in patches:
        outside &= ~patch.contains(lattice)
    points = np.concatenate([lattice[outside], *(p.points for p in placements)])
    logger.debug("パッチ付きネット: %d 点, %d 個のパッチ", len(points), count)
    net = NetWindow(dim=dim, points=points, window_radius=radius, label=f"patched[{psi.label}]")
    return PatchedNet(net=net, layout=layout)


def patch_bijection(patched: PatchedNet) -> ExplicitMap:
    """X_ψ → ℤ^d の全単射 h を返します。

    S_k の外では恒等写像、S_k の中では Ξ_k と ℤ^d ∩ S_k をそれぞれ辞書式順に
    並べて順に対応させます。

    Raises:
        PreconditionViolatedError: パッチ内の点数が一致しない場合
    """
    net, layout = patched.net, patched.layout
    inside = np.zeros(len(net), dtype=bool)
    for patch in layout.patches:
        inside |= patch.contains(net.points)
    sources = [net.points[~inside]]
    targets = [net.points[~inside]]
    for k, patch in enumerate(layout.patches, start=1):
        placed = layout.patch_points(k)
        placed = placed[np.lexsort(placed.T[::-1])]
        lattice = patch.lattice_points()
        if len(placed) != len(lattice):
            msg = f"S_{k} の点数が一致しません: |Ξ_{k}|={len(placed)}, |ℤ^d∩S_{k}|={len(lattice)}"
            raise PreconditionViolatedError(msg, witness=k)
        sources.append(placed)
        targets.append(lattice)
    return ExplicitMap(
        sources=np.concatenate(sources),
        targets=np.concatenate(targets),
        domain_radius=net.window_radius,
        label="h",
    )


def patch_diameter_bound(layout: CubeLayout, radius: float) -> float:
    """max{diam S_k : S_k ∩ B̄(0, radius) ≠ ∅}(該当なしなら 0)。"""
    diameters = [
        patch.diameter
        for patch in layout.patches
        if patch.distance_to_origin() <= radius + BALL_TOLERANCE
    ]
    return max(diameters, default=0.0)


def psi_chain_bound(layout: CubeLayout, radius: float) -> float:
    """ψ(n) ≤ R < ψ(n+1) のときの上界 √d·l_n(R < ψ(1) なら √d·l_1)。"""
    dim = layout.regions[0].dim
    reached = [k for k, value in enumerate(layout.psi_values, start=1) if value <= radius]
    n = max(reached, default=1)
    return math.sqrt(dim) * layout.sides[n - 1]


def patch_points_in_lattice_count(layout: CubeLayout, net: NetWindow) -> list[tuple[int, int]]:
    """各 k について (|X_ψ ∩ S_k|, |ℤ^d ∩ S_k|) を返します。"""
    return [
        (int(np.count_nonzero(patch.contains(net.points))), len(patch.lattice_points()))
        for patch in layout.patches
    ]


