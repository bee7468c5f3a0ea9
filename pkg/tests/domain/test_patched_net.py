"""src/domain/patched_net.py のテスト"""

import dataclasses
import math
from fractions import Fraction

import numpy as np
import pytest

from src.domain.density import DensityField
from src.domain.errors import (
    IncompleteWindowError,
    InvalidParameterError,
    PreconditionViolatedError,
)
from src.domain.growth import GrowthFunction
from src.domain.net_core import integer_lattice_window
from src.domain.patched_net import (
    Cube,
    apportion,
    dyadic_placement,
    layout_violations,
    patch_bijection,
    patch_points_in_lattice_count,
    patched_net,
    psi_chain_bound,
)


@pytest.fixture
def small_patched():
    """一様密度、l = (2, 3)、ψ(k) = k のパッチ付きネット"""
    return patched_net(DensityField.uniform(2), [2, 3], GrowthFunction.linear())


class TestApportion:
    """apportion のテスト"""

    def test_largest_remainder(self):
        """剰余が等しいときは添字の小さい方から 1 を足す"""
        assert apportion([Fraction(25, 4)] * 4, 25) == [7, 6, 6, 6]

    def test_exact_targets_unchanged(self):
        """整数の目標値はそのまま"""
        assert apportion([Fraction(2), Fraction(6)], 8) == [2, 6]

    def test_impossible_total_raises(self):
        """床関数の和が総数を超えるとエラー"""
        with pytest.raises(PreconditionViolatedError):
            apportion([Fraction(3), Fraction(3)], 5)


class TestCube:
    """Cube のテスト"""

    def test_geometry(self):
        """距離と格子点"""
        first = Cube((0.5, 0.5), 2.0)
        second = Cube((5.5, 0.5), 2.0)
        assert first.distance_to(second) == pytest.approx(3.0)
        assert first.diameter == pytest.approx(2 * math.sqrt(2))
        assert first.lattice_points().tolist() == [[1.0, 1.0], [1.0, 2.0], [2.0, 1.0], [2.0, 2.0]]

    def test_nonpositive_side_rejected(self):
        """辺の長さは正"""
        with pytest.raises(InvalidParameterError):
            Cube((0.0,), 0.0)


class TestDyadicPlacement:
    """dyadic_placement のテスト"""

    def test_uniform_counts(self):
        """一様密度では各小立方体に同数"""
        placement = dyadic_placement(DensityField.uniform(2), 4, Cube((0.0, 0.0), 4.0))
        assert placement.cells_per_axis == 2
        assert placement.cell_counts == (4, 4, 4, 4)
        assert len(placement.points) == 16

    def test_checkerboard_counts_match_targets(self):
        """市松模様の目標値は整数になり、そのまま個数になる"""
        rho = DensityField.checkerboard(dim=2, m=2, low=0.5, high=1.5)
        placement = dyadic_placement(rho, 4, Cube((0.5, 0.5), 4.0))
        assert sum(placement.cell_counts) == 16
        assert [Fraction(n) for n in placement.cell_counts] == list(placement.cell_targets)
        assert np.all(Cube((0.5, 0.5), 4.0).contains(placement.points))

    def test_points_are_distinct(self):
        """詰めた点は互いに異なる"""
        placement = dyadic_placement(DensityField.uniform(2), 5, Cube((0.5, 0.5), 5.0))
        assert len(np.unique(placement.points, axis=0)) == 25

    def test_outer_centers_filled_first(self):
        """同じ分割の中では S_k の中心から遠い中心から埋まる"""
        rho = DensityField.checkerboard(dim=2, m=2, low=0.5, high=1.5)
        placement = dyadic_placement(rho, 4, Cube((0.0, 0.0), 4.0))
        assert placement.cell_counts == (2, 6, 6, 2)
        assert placement.points[:2].tolist() == [[1.0, 1.0], [0.5, 0.5]]
        assert placement.points[-2:].tolist() == [[3.0, 3.0], [3.5, 3.5]]

    def test_side_mismatch_rejected(self):
        """S_k の辺の長さが l_k でなければエラー"""
        with pytest.raises(InvalidParameterError):
            dyadic_placement(DensityField.uniform(2), 4, Cube((0.0, 0.0), 3.0))

    def test_dimension_mismatch_rejected(self):
        """密度と立方体の次元が違えばエラー"""
        with pytest.raises(InvalidParameterError, match="次元"):
            dyadic_placement(DensityField.uniform(1), 2, Cube((0.5, 0.5), 2.0))


class TestPatchedNet:
    """patched_net のテスト"""

    def test_layout(self, small_patched):
        """領域は ψ(k) だけ離れ、パッチの頂点は半奇数"""
        layout = small_patched.layout
        assert layout_violations(layout) == []
        assert layout.regions[0].corner == (-2.5, -2.5)
        assert layout.regions[1].corner == (3.5, -2.5)
        assert layout.regions[0].distance_to(layout.regions[1]) == pytest.approx(2.0)
        assert layout.patches[0].corner == (-1.5, -1.5)
        assert layout.patches[1].corner == (6.5, 0.5)

    def test_point_count_matches_lattice(self, small_patched):
        """パッチの中と外で点数は ℤ^d と同じ"""
        net = small_patched.net
        assert len(net) == len(integer_lattice_window(2, net.window_radius))
        assert patch_points_in_lattice_count(small_patched.layout, net) == [(4, 4), (9, 9)]

    def test_invalid_sides(self):
        """l_1 ≥ 2 の狭義単調増加列でなければエラー"""
        with pytest.raises(InvalidParameterError):
            patched_net(DensityField.uniform(2), [1, 3], GrowthFunction.linear())
        with pytest.raises(InvalidParameterError):
            patched_net(DensityField.uniform(2), [3, 3], GrowthFunction.linear())
        with pytest.raises(InvalidParameterError):
            patched_net(DensityField.uniform(2), [2, 3], GrowthFunction.linear(), k_max=3)

    def test_window_too_small(self):
        """S_k が窓に収まらなければエラー"""
        with pytest.raises(IncompleteWindowError):
            patched_net(
                DensityField.uniform(2), [2, 3], GrowthFunction.linear(), window_radius=5.0
            )

    def test_dropped_point_is_detected(self, small_patched):
        """Ξ_1 から1点落とすと配置の検査で見つかる"""
        layout = small_patched.layout
        first = layout.placements[0]
        broken = dataclasses.replace(first, points=first.points[1:])
        tampered = dataclasses.replace(layout, placements=(broken, *layout.placements[1:]))
        violations = layout_violations(tampered)
        assert any("|Ξ_1|" in v for v in violations)


class TestPatchBijection:
    """patch_bijection / psi_chain_bound のテスト"""

    def test_bijection_onto_lattice(self, small_patched):
        """h は X_ψ の窓から ℤ^d の窓への全単射"""
        mapping = patch_bijection(small_patched)
        lattice = integer_lattice_window(2, small_patched.net.window_radius)
        assert len(mapping) == len(lattice)
        targets = mapping.targets[np.lexsort(mapping.targets.T[::-1])]
        assert np.array_equal(targets, lattice.points)

    def test_displacement_within_patch_diameter(self, small_patched):
        """変位は最大のパッチの対角線以下"""
        mapping = patch_bijection(small_patched)
        assert float(mapping.displacements.max()) <= 3 * math.sqrt(2) + 1e-9

    def test_psi_chain_bound(self, small_patched):
        """ψ(n) ≤ R < ψ(n+1) なら √d·l_n"""
        layout = small_patched.layout
        assert psi_chain_bound(layout, 0.5) == pytest.approx(2 * math.sqrt(2))
        assert psi_chain_bound(layout, 1.5) == pytest.approx(2 * math.sqrt(2))
        assert psi_chain_bound(layout, 5.0) == pytest.approx(3 * math.sqrt(2))
