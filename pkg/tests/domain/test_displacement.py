"""src/domain/displacement.py のテスト"""

import math

import pytest

from src.domain.displacement import (
    compose_curves,
    counting_lower_bound,
    counting_lower_curve,
    displacement_curve,
    identity_map,
    inverse_curve_bound,
    translation_map,
)
from src.domain.errors import (
    IncompleteMapError,
    IncompleteWindowError,
    InvalidParameterError,
    PreconditionViolatedError,
)
from src.domain.growth import GrowthFunction
from src.domain.models import CurveKind, DisplacementCurve, ExplicitMap
from src.domain.net_core import integer_lattice_window


class TestDisplacementCurve:
    """displacement_curve のテスト"""

    def test_identity_is_zero(self):
        """恒等写像の変位は常に 0"""
        curve = displacement_curve(identity_map(integer_lattice_window(2, 5.0)))
        assert set(curve.values) == {0.0}
        assert curve.max_radius == 5.0
        assert curve.kind == CurveKind.EXACT

    def test_translation_is_constant(self):
        """平行移動の変位はベクトルの長さ"""
        mapping = translation_map(integer_lattice_window(2, 5.0), (3.0, 4.0))
        curve = displacement_curve(mapping, radii=[0.0, 2.0, 5.0])
        assert curve.values == (5.0, 5.0, 5.0)

    def test_halving_grows_linearly(self):
        """x ↦ x/2 の変位は R/2"""
        evens = integer_lattice_window(1, 10.0, scale=2.0)
        halving = ExplicitMap(evens.points, evens.points / 2, 10.0)
        curve = displacement_curve(halving, radii=[1.0, 4.0, 10.0])
        assert curve.values == (0.0, 2.0, 5.0)

    def test_origin_shifts_balls(self):
        """基準点を動かすと球も動く"""
        evens = integer_lattice_window(1, 10.0, scale=2.0)
        halving = ExplicitMap(evens.points, evens.points / 2, 10.0)
        curve = displacement_curve(halving, radii=[0.0, 2.0], origin=(4.0,))
        assert curve.values == (2.0, 3.0)
        assert curve.param("origin_0") == 4.0

    def test_radius_beyond_domain_raises(self):
        """定義域を超える半径はエラー"""
        mapping = identity_map(integer_lattice_window(1, 5.0))
        with pytest.raises(IncompleteMapError):
            displacement_curve(mapping, radii=[6.0])

    def test_translation_dimension_checked(self):
        """平行移動ベクトルの次元が違えばエラー"""
        with pytest.raises(InvalidParameterError):
            translation_map(integer_lattice_window(2, 5.0), (1.0,))


class TestCountingLowerBound:
    """counting_lower_bound / counting_lower_curve のテスト"""

    @pytest.fixture
    def halves(self):
        return integer_lattice_window(1, 30.0, scale=0.5)

    def test_half_lattice_into_integers(self, halves):
        """½ℤ の 41 点を ℤ に入れると少なくとも 10 動く"""
        bound = counting_lower_bound(halves, integer_lattice_window(1, 30.0), 10.0)
        assert bound.value == 10.0
        assert bound.validity_cap == 20.0
        assert not bound.truncated

    def test_truncated_when_reference_window_is_short(self, halves):
        """Z の窓に点が足りなければ打ち切る"""
        bound = counting_lower_bound(halves, integer_lattice_window(1, 15.0), 10.0)
        assert bound.truncated
        assert bound.value == 5.0

    def test_radius_beyond_reference_raises(self, halves):
        """Z の窓を超える半径はエラー"""
        with pytest.raises(IncompleteWindowError):
            counting_lower_bound(halves, integer_lattice_window(1, 5.0), 10.0)

    def test_same_net_gives_zero(self):
        """同じネットどうしの下界は 0"""
        lattice = integer_lattice_window(2, 10.0)
        assert counting_lower_bound(lattice, lattice, 5.0).value == 0.0

    def test_curve(self, halves):
        """下界の曲線は半径について単調"""
        curve = counting_lower_curve(halves, integer_lattice_window(1, 30.0), [10.0, 5.0])
        assert curve.radii == (5.0, 10.0)
        assert curve.values == (5.0, 10.0)
        assert curve.kind == CurveKind.COUNTING_LOWER_BOUND


class TestComposeCurves:
    """compose_curves のテスト"""

    def test_compose(self):
        """g(R + f(R)) + f(R)"""
        f = DisplacementCurve((1.0, 2.0), (1.0, 1.0), CurveKind.ANALYTIC_UPPER_BOUND)
        g = DisplacementCurve((1.0, 5.0), (2.0, 2.0), CurveKind.ANALYTIC_UPPER_BOUND)
        assert compose_curves(f, g).values == (3.0, 3.0)

    def test_truncated_when_outer_curve_is_short(self):
        """g の曲線が R + f(R) に届かなければ打ち切る"""
        f = DisplacementCurve((1.0, 2.0), (1.0, 10.0), CurveKind.ANALYTIC_UPPER_BOUND)
        g = DisplacementCurve((1.0, 5.0), (2.0, 2.0), CurveKind.ANALYTIC_UPPER_BOUND)
        composed = compose_curves(f, g)
        assert composed.radii == (1.0,)
        assert composed.truncated


class TestInverseCurveBound:
    """inverse_curve_bound のテスト"""

    @pytest.fixture
    def unit_shift_curve(self):
        mapping = translation_map(integer_lattice_window(1, 100.0), (1.0,))
        return displacement_curve(mapping, radii=[1.0, 4.0, 16.0, 64.0])

    def test_sqrt_bound(self, unit_shift_curve):
        """√R では R₀ = 4、C_φ = √2"""
        bound = inverse_curve_bound(unit_shift_curve, GrowthFunction.sqrt())
        assert bound.radii == (4.0, 16.0, 64.0)
        assert bound.param("r0") == 4.0
        assert bound.param("c_phi") == pytest.approx(math.sqrt(2))
        assert bound.values == pytest.approx((2 * math.sqrt(2), 4 * math.sqrt(2), 8 * math.sqrt(2)))

    def test_curve_above_phi_raises(self):
        """f の曲線が φ を超えていればエラー(witness は半径)"""
        curve = DisplacementCurve((1.0,), (5.0,), CurveKind.EXACT)
        with pytest.raises(PreconditionViolatedError) as excinfo:
            inverse_curve_bound(curve, GrowthFunction.sqrt())
        assert excinfo.value.witness == 1.0

    def test_linear_phi_rejected(self, unit_shift_curve):
        """o(R) でない φ はエラー"""
        with pytest.raises(PreconditionViolatedError, match="o\\(R\\)"):
            inverse_curve_bound(unit_shift_curve, GrowthFunction.linear())
