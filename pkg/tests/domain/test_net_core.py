"""src/domain/net_core.py のテスト"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.domain.density import HalfSpaceTarget
from src.domain.errors import DegenerateInputError, IncompleteWindowError, InvalidParameterError
from src.domain.models import Box, NetWindow
from src.domain.net_core import (
    ball_count,
    certify,
    counting_measure_discrepancy,
    dyadic_boxes,
    integer_lattice_window,
    layer_gap,
    natural_density_curve,
    net_constant_in_box,
)


class TestIntegerLatticeWindow:
    """integer_lattice_window のテスト"""

    @pytest.mark.parametrize(
        ("dim", "radius", "expected"),
        [(2, 2.0, 13), (2, 50.0, 7845), (1, 2.5, 5), (3, 1.0, 7)],
    )
    def test_point_counts(self, dim, radius, expected):
        """格子点の数(ガウスの円問題の値と一致)"""
        assert len(integer_lattice_window(dim, radius)) == expected

    def test_scale_and_offset(self):
        """間隔と平行移動"""
        window = integer_lattice_window(1, 3.0, scale=2.0, offset=(1.0,))
        assert window.points.ravel().tolist() == [-3.0, -1.0, 1.0, 3.0]

    def test_invalid_parameters(self):
        """正でない間隔・半径、次元の合わない offset はエラー"""
        with pytest.raises(InvalidParameterError):
            integer_lattice_window(2, 0.0)
        with pytest.raises(InvalidParameterError):
            integer_lattice_window(2, 1.0, scale=-1.0)
        with pytest.raises(InvalidParameterError):
            integer_lattice_window(2, 1.0, offset=(0.5,))


class TestLayerGap:
    """layer_gap のテスト"""

    def test_lattice_gap_is_one(self):
        """ℤ² の層間ギャップは原点からの 1"""
        assert layer_gap(integer_lattice_window(2, 10.0)) == pytest.approx(1.0)

    def test_gap_from_origin_counts(self):
        """ℓ₀ = 0 からの最初のギャップも含む"""
        window = NetWindow(dim=1, points=[[-3.0], [3.0], [4.0]], window_radius=4.0)
        assert layer_gap(window) == 3.0

    def test_empty_window(self):
        """空の窓では 0"""
        assert layer_gap(NetWindow(dim=1, points=[], window_radius=1.0)) == 0.0


class TestCertify:
    """certify のテスト"""

    def test_one_dimensional_lattice(self):
        """ℤ の証明書"""
        cert = certify(integer_lattice_window(1, 10.0))
        assert cert.separation == 1.0
        assert cert.net_constant == pytest.approx(0.5)
        assert cert.layer_gap == 1.0
        assert cert.probe_count > 0

    def test_planar_lattice_net_constant(self):
        """ℤ² のネット定数はセルの中心までの距離 √2/2"""
        cert = certify(integer_lattice_window(2, 10.0))
        assert cert.separation == pytest.approx(1.0)
        assert cert.net_constant == pytest.approx(math.sqrt(2) / 2)

    def test_probe_radius_is_capped(self):
        """プローブ領域を指定した半径に縮める"""
        cert = certify(integer_lattice_window(2, 10.0), probe_radius=5.0)
        assert cert.probe_radius == 5.0

    def test_single_point_raises(self):
        """1点では証明書を計算できない"""
        with pytest.raises(DegenerateInputError):
            certify(NetWindow(dim=1, points=[[0.0]], window_radius=1.0))

    @settings(deadline=None, max_examples=20)
    @given(factor=st.floats(min_value=0.1, max_value=10.0))
    def test_scaling_scales_constants(self, factor):
        """窓を factor 倍すると分離定数とネット定数も factor 倍になる"""
        base = certify(integer_lattice_window(1, 10.0))
        scaled = certify(integer_lattice_window(1, 10.0).scaled(factor))
        assert scaled.separation == pytest.approx(factor * base.separation)
        assert scaled.net_constant == pytest.approx(factor * base.net_constant)


class TestNetConstantInBox:
    """net_constant_in_box のテスト"""

    def test_single_center_point(self):
        """中心1点のとき、値は半対角線"""
        value = net_constant_in_box(np.array([[0.5, 0.5]]), (0.0, 0.0), (1.0, 1.0), 0.25)
        assert value == pytest.approx(math.sqrt(2) / 2)

    def test_invalid_inputs(self):
        """空の点集合と正でない間隔はエラー"""
        with pytest.raises(DegenerateInputError):
            net_constant_in_box(np.zeros((0, 1)), (0.0,), (1.0,), 0.1)
        with pytest.raises(InvalidParameterError):
            net_constant_in_box(np.zeros((1, 1)), (0.0,), (1.0,), 0.0)


class TestBallCount:
    """ball_count のテスト"""

    def test_closed_ball(self):
        """境界上の点を含む"""
        lattice = integer_lattice_window(2, 5.0)
        assert ball_count(lattice, 1.0) == 5
        assert ball_count(lattice, 5.0) == len(lattice)

    def test_radius_beyond_window_raises(self):
        """窓を超える半径はエラー"""
        with pytest.raises(IncompleteWindowError):
            ball_count(integer_lattice_window(1, 2.0), 3.0)

    @settings(deadline=None)
    @given(
        first=st.floats(min_value=0.0, max_value=20.0),
        second=st.floats(min_value=0.0, max_value=20.0),
    )
    def test_monotone_in_radius(self, first, second):
        """半径について単調非減少"""
        lattice = integer_lattice_window(2, 20.0)
        low, high = sorted((first, second))
        assert ball_count(lattice, low) <= ball_count(lattice, high)


class TestNaturalDensityCurve:
    """natural_density_curve のテスト"""

    def test_even_integers_have_density_half(self):
        """2ℤ の自然密度は 1/2 に近づく"""
        window = integer_lattice_window(1, 1000.0, scale=2.0)
        [(_, alpha)] = natural_density_curve(window, [1000.0])
        assert alpha == pytest.approx(0.5, abs=1e-3)

    def test_planar_lattice_density_one(self):
        """ℤ² の自然密度は 1 に近い"""
        [(_, alpha)] = natural_density_curve(integer_lattice_window(2, 50.0), [50.0])
        assert alpha == pytest.approx(7845 / (math.pi * 2500))

    def test_nonpositive_radius_raises(self):
        """正でない半径はエラー"""
        with pytest.raises(InvalidParameterError):
            natural_density_curve(integer_lattice_window(1, 2.0), [0.0])


class TestDiscrepancy:
    """dyadic_boxes / counting_measure_discrepancy のテスト"""

    def test_dyadic_box_count(self):
        """レベル 0..3 の箱の数は 1 + 4 + 16 + 64"""
        assert len(dyadic_boxes(2)) == 85

    def test_lattice_discrepancy_decreases(self):
        """ℤ² の不一致度は半径を倍にしていくと小さくなる"""
        lattice = integer_lattice_window(2, 200.0)
        small = counting_measure_discrepancy(lattice, 25.0)
        large = counting_measure_discrepancy(lattice, 200.0)
        assert large < small
        assert large < 0.01

    def test_halfspace_target(self):
        """半空間の目標測度では箱ごとに c と 2−c の重みを付ける"""
        target = HalfSpaceTarget(1.5)
        assert target.integrate_box(Box((-0.5, 0.0), (0.5, 0.2))) == pytest.approx(0.2)
        assert target.integrate_box(Box((0.0, 0.0), (0.5, 0.2))) == pytest.approx(0.15)

    def test_box_outside_unit_ball_rejected(self):
        """単位球の外にはみ出す箱はエラー"""
        lattice = integer_lattice_window(2, 10.0)
        with pytest.raises(InvalidParameterError, match="単位球"):
            counting_measure_discrepancy(lattice, 10.0, [Box((0.0, 0.0), (1.0, 1.0))])

    def test_empty_family_rejected(self):
        """空の箱の族はエラー"""
        with pytest.raises(InvalidParameterError):
            counting_measure_discrepancy(integer_lattice_window(2, 10.0), 10.0, [])
