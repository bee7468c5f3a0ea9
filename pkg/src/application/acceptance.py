"""有限窓上の受け入れ基準と故障注入。

各基準は、構成の証明が依存する不等式を具体的な窓の上で厳密に検査します。
基準関数は (成否, 詳細) を返し、詳細はそのまま JSON レポートに書き出されます。
"""

import dataclasses
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from typing import Any

import numpy as np
from scipy.spatial import cKDTree

from src.application.builders import BuiltNet, build_radial
from src.domain.constants import BALL_TOLERANCE, ORACLE_SPAN, ORACLE_TRIALS
from src.domain.counterexamples import halfspace_net, onedim_counterexample
from src.domain.density import DensityField
from src.domain.displacement import counting_lower_bound, displacement_curve, inverse_curve_bound
from src.domain.errors import NetLabError, ScheduleInfeasibleError
from src.domain.growth import GrowthFunction, doubling_constant, half_threshold
from src.domain.matching import bottleneck_bijection, brute_force_bottleneck
from src.domain.models import Box, ExplicitMap, Matching, NetWindow
from src.domain.net_core import (
    counting_measure_discrepancy,
    integer_lattice_window,
    layer_gap,
    natural_density_curve,
    net_constant_in_box,
)
from src.domain.patched_net import (
    Cube,
    dyadic_placement,
    layout_violations,
    patch_bijection,
    patch_points_in_lattice_count,
    patched_net,
    psi_chain_bound,
)
from src.domain.radial_rescale import RadialProfile, slope_bounds_check
from src.domain.schedule import RadiusSchedule

logger = logging.getLogger(__name__)

# ============================================================================
# 基準のパラメータ
# ============================================================================

#: 動径再配置の上界・下界の検査で使う窓の半径
RADIAL_WINDOW = 600.0

#: 動径再配置の上界・下界の検査で使うスケジュールの比 K
RADIAL_RATIO = 4.0

#: 動径再配置の上界の検査の絶対許容誤差
RADIAL_TOLERANCE = 1e-9

#: 逆写像の上界の許容誤差
INVERSE_TOLERANCE = 1e-6

#: 二進配置で試す辺の長さ
PLACEMENT_SIDES = range(2, 13)

#: 二進配置のネット定数が l_k について許される変動の比(この値未満)
PLACEMENT_SPREAD_RATIO = 2.0

#: 反例の ψ の項数
COUNTEREXAMPLE_TERMS = 8

#: 半空間ネットの密度 c と窓の半径
HALFSPACE_C = 1.5
HALFSPACE_WINDOW = 500.0

#: 半空間ネットの検査半径
HALFSPACE_RADII = (200.0, 350.0, 500.0)

#: H⁺ 内の体積 0.1 のテスト箱
HALFSPACE_BOX = Box(lo=(0.1, -0.125), hi=(0.5, 0.125))

#: 不一致度が収まるべき範囲((c−1)·0.1 = 0.05 の周り)
HALFSPACE_DISCREPANCY_RANGE = (0.03, 0.07)

#: α̂ の許容誤差
DENSITY_TOLERANCE = 0.05

Details = dict[str, Any]


@dataclass(frozen=True)
class CriterionResult:
    """1つの基準(または故障注入)の結果。

    Attributes:
        criterion_id: 基準番号("1".."10")または故障注入の番号("F1"..)
        name: 短い名前
        passed: 成否
        details: JSON 化できる詳細
        seconds: 実行時間
    """

    criterion_id: str
    name: str
    passed: bool
    details: Details = field(default_factory=dict)
    seconds: float = 0.0

    def timed(self, seconds: float) -> "CriterionResult":
        return dataclasses.replace(self, seconds=seconds)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.criterion_id,
            "name": self.name,
            "passed": self.passed,
            "details": self.details,
            "seconds": round(self.seconds, 3),
        }


# ============================================================================
# 共有の構成
# ============================================================================


@cache
def radial_lattice() -> NetWindow:
    """ℤ² ∩ B̄(0, 600)。"""
    return integer_lattice_window(2, RADIAL_WINDOW)


@cache
def sqrt_construction() -> BuiltNet:
    """X = Z = ℤ², φ(R) = √R の動径再配置(スケジュールは窓に合わせて切り詰め)。"""
    return build_radial(radial_lattice(), GrowthFunction.sqrt(), RADIAL_RATIO, 3)


RadialParts = tuple[ExplicitMap, RadiusSchedule, RadialProfile, GrowthFunction]


def _radial_parts(built: BuiltNet) -> RadialParts:
    mapping, schedule, profile, phi = built.mapping, built.schedule, built.profile, built.phi
    if mapping is None or schedule is None or profile is None or phi is None:
        msg = "動径再配置の構成ではありません"
        raise NetLabError(msg)
    return mapping, schedule, profile, phi


# ============================================================================
# 基準
# ============================================================================


def radial_upper_bound(_seed: int) -> tuple[bool, Details]:
    """disp_{R̄_i}(g) ≤ φ(R_i) を各スケジュール半径で検査します。"""
    built = sqrt_construction()
    mapping, schedule, profile, phi = _radial_parts(built)
    outer = list(profile.outer[1:])
    curve = displacement_curve(mapping, radii=outer)
    rows = [
        {
            "R": r,
            "R_bar": r_bar,
            "disp": disp,
            "phi": phi(r),
            "ok": disp <= phi(r) + RADIAL_TOLERANCE,
        }
        for r, r_bar, disp in zip(schedule.radii, outer, curve.values, strict=True)
    ]
    schedule_ok = schedule.radii == (16.0, 256.0) and tuple(outer) == (20.0, 272.0)
    passed = schedule_ok and all(row["ok"] for row in rows)
    return passed, {"schedule_ok": schedule_ok, "rows": rows}


def radial_lower_bound(_seed: int) -> tuple[bool, Details]:
    """数え上げの下界 ≥ φ(R_i) − s_Z と、ボトルネック最適値 ≥ 下界を検査します。"""
    built = sqrt_construction()
    _, schedule, _, phi = _radial_parts(built)
    x_net, y_net = built.reference, built.net
    gap = layer_gap(x_net)
    rows = []
    for radius in schedule.radii:
        bound = counting_lower_bound(y_net, x_net, radius).value
        rows.append({"R": radius, "counting": bound, "phi_minus_s": phi(radius) - gap})
    counting_ok = all(row["counting"] >= row["phi_minus_s"] for row in rows)

    first = schedule.radii[0]
    cap = 2 * phi(first)
    sources = y_net.points[y_net.within(first)]
    targets = x_net.points[x_net.within(first + cap)]
    matching = bottleneck_bijection(sources, targets, radius_cap=cap)
    floor = counting_lower_bound(y_net, x_net, first).value
    bottleneck_ok = matching.bottleneck >= floor - RADIAL_TOLERANCE
    details = {
        "layer_gap": gap,
        "rows": rows,
        "bottleneck": matching.bottleneck,
        "bottleneck_sources": len(sources),
        "bottleneck_targets": len(targets),
        "counting_at_R1": floor,
    }
    return counting_ok and bottleneck_ok, details


def oracle_equivalence(seed: int) -> tuple[bool, Details]:
    """ボトルネック値を総当たりの値と乱択インスタンスで比較します。"""
    rng = np.random.default_rng(seed)
    details: Details = {}
    passed = True
    for dim in (1, 2):
        matches = 0
        for _ in range(ORACLE_TRIALS):
            n = int(rng.integers(2, 8))
            m = int(rng.integers(n, 8))
            sources = rng.uniform(0.0, ORACLE_SPAN, size=(n, dim))
            targets = rng.uniform(0.0, ORACLE_SPAN, size=(m, dim))
            fast = bottleneck_bijection(sources, targets).bottleneck
            matches += fast == brute_force_bottleneck(sources, targets)
        details[f"d={dim}"] = f"{matches}/{ORACLE_TRIALS}"
        passed = passed and matches == ORACLE_TRIALS
    return passed, details


def slope_certificate(_seed: int) -> tuple[bool, Details]:
    """プロファイルの傾きが双リプシッツ性の範囲に入ることを検査します。"""
    _, _, profile, _ = _radial_parts(sqrt_construction())
    report = slope_bounds_check(profile)
    return report.ok, {
        "slopes": list(report.slopes),
        "K": report.ratio,
        "L": report.lower,
        "U": report.upper,
        "slope_min": report.slope_min,
        "slope_max": report.slope_max,
        "violations": list(report.violations),
    }


def _placement_rows(rho: DensityField) -> list[dict[str, Any]]:
    rows = []
    for side in PLACEMENT_SIDES:
        patch = Cube((0.5,) * rho.dim, float(side))
        placement = dyadic_placement(rho, side, patch)
        points = placement.points
        distances, _ = cKDTree(points).query(points, k=2)
        cell_side = side / placement.cells_per_axis
        deviation = max(
            abs(Fraction(n) - t)
            for n, t in zip(placement.cell_counts, placement.cell_targets, strict=True)
        )
        net_constant = net_constant_in_box(points, tuple(patch.lo), tuple(patch.hi), cell_side / 16)
        rows.append(
            {
                "l": side,
                "count": len(points),
                "count_ok": len(points) == side**rho.dim,
                "max_cell_deviation": str(deviation),
                "cells_ok": deviation <= 1,
                "separation": float(distances[:, 1].min()),
                "net_constant": net_constant,
                "net_constant_ok": net_constant
                <= np.sqrt(rho.dim) * cell_side / 2 + BALL_TOLERANCE,
            }
        )
    return rows


def _spread_ratio(values: list[float]) -> float:
    return max(values) / min(values)


def dyadic_placement_check(_seed: int) -> tuple[bool, Details]:
    """二進配置の点数・セルごとの丸め・分離定数とネット定数の一様性を検査します。

    l_k を動かしたときのネット定数の最大と最小の比は PLACEMENT_SPREAD_RATIO 未満です。
    入れ子の中心は親の中心から 2 の冪に比例する距離にあるので、分離定数の比は
    ちょうど 2 になり得て、こちらは 2 以下を求めます。
    """
    details: Details = {}
    passed = True
    densities = {
        "uniform": DensityField.uniform(2),
        "checkerboard": DensityField.checkerboard(2, 2, 0.5, 1.5),
    }
    for name, rho in densities.items():
        rows = _placement_rows(rho)
        separation_ratio = _spread_ratio([row["separation"] for row in rows])
        net_constant_ratio = _spread_ratio([row["net_constant"] for row in rows])
        ok = (
            separation_ratio <= PLACEMENT_SPREAD_RATIO + BALL_TOLERANCE
            and net_constant_ratio < PLACEMENT_SPREAD_RATIO
            and all(row["count_ok"] and row["cells_ok"] and row["net_constant_ok"] for row in rows)
        )
        details[name] = {
            "separation_ratio": separation_ratio,
            "net_constant_ratio": net_constant_ratio,
            "ok": ok,
            "rows": rows,
        }
        passed = passed and ok
    return passed, details


def patch_bijection_bound(_seed: int) -> tuple[bool, Details]:
    """パッチ全単射 h の曲線が √d·l_n 以下で、各 S_k の点数が一致することを検査します。"""
    patched = patched_net(DensityField.uniform(2), [2, 3, 4, 5], GrowthFunction.power(1.0, 25.0))
    curve = displacement_curve(patch_bijection(patched))
    excess = max(value - psi_chain_bound(patched.layout, r) for r, value in curve.rows())
    counts = patch_points_in_lattice_count(patched.layout, patched.net)
    counts_ok = all(a == b for a, b in counts)
    details = {
        "window_radius": patched.net.window_radius,
        "max_excess_over_bound": excess,
        "samples": len(curve),
        "patch_counts": [list(c) for c in counts],
    }
    return excess <= BALL_TOLERANCE and counts_ok, details


def onedim_counterexample_check(_seed: int) -> tuple[bool, Details]:
    """1次元の例で、順方向の曲線が線形、逆方向が ζ より速く増えることを検査します。"""
    zeta = GrowthFunction.linear()
    example = onedim_counterexample(zeta, COUNTEREXAMPLE_TERMS)
    mapping = example.mapping
    evens = np.all(np.mod(mapping.sources, 2.0) == 0.0, axis=1)
    even_map = ExplicitMap(
        mapping.sources[evens], mapping.targets[evens], mapping.domain_radius, "f|2Z"
    )
    even_curve = displacement_curve(even_map)
    full_curve = displacement_curve(mapping)
    even_ok = all(value <= r / 2 + BALL_TOLERANCE for r, value in even_curve.rows())
    full_ok = all(value <= r + BALL_TOLERANCE for r, value in full_curve.rows())

    inverse = mapping.inverse(example.y_net.window_radius)
    rows = []
    for n in range(2, COUNTEREXAMPLE_TERMS + 1):
        previous, current = example.psi[n - 2], example.psi[n - 1]
        disp = displacement_curve(inverse, radii=[float(previous)]).values[0]
        jump = current - previous
        growth = n * Fraction(zeta(float(previous)))
        rows.append(
            {
                "n": n,
                "psi_n_minus_1": str(previous),
                "disp_inverse": disp,
                "psi_gap": str(jump),
                "n_zeta": str(growth),
                "ok": Fraction(disp) >= jump >= growth,
            }
        )
    details = {
        "forward_on_2Z_at_most_half": even_ok,
        "forward_at_most_R": full_ok,
        "max_forward_over_half_plus_one": max(v - (r / 2 + 1) for r, v in full_curve.rows()),
        "rows": rows,
    }
    return even_ok and full_ok and all(row["ok"] for row in rows), details


def density_falsifier(_seed: int) -> tuple[bool, Details]:
    """半空間ネットで α̂ → 1 だが、テスト箱の不一致度が 0 に近づかないことを検査します。"""
    net = halfspace_net(HALFSPACE_C, 2, HALFSPACE_WINDOW)
    [(_, alpha)] = natural_density_curve(net, [HALFSPACE_WINDOW])
    low, high = HALFSPACE_DISCREPANCY_RANGE
    discrepancies = {
        str(r): counting_measure_discrepancy(net, r, [HALFSPACE_BOX]) for r in HALFSPACE_RADII
    }
    alpha_ok = abs(alpha - 1.0) <= DENSITY_TOLERANCE
    box_ok = all(low <= d <= high for d in discrepancies.values())
    return alpha_ok and box_ok, {
        "alpha_hat": alpha,
        "discrepancy": discrepancies,
        "target": (HALFSPACE_C - 1) * HALFSPACE_BOX.volume,
    }


def class_separation(_seed: int) -> tuple[bool, Details]:
    """ln(e+R) と √R の構成を共通の窓で比べ、下界と上界の間に差があることを検査します。"""
    lattice = radial_lattice()
    slow = build_radial(lattice, GrowthFunction.log(), RADIAL_RATIO, 3, extend_tail=True)
    fast = build_radial(lattice, GrowthFunction.sqrt(), RADIAL_RATIO, 3, extend_tail=True)
    slow_map, _, _, slow_phi = _radial_parts(slow)
    _, fast_schedule, _, fast_phi = _radial_parts(fast)
    gap = layer_gap(lattice)

    radii = list(fast_schedule.radii)
    forward = displacement_curve(slow_map, radii=radii).values
    backward = displacement_curve(slow_map.inverse(slow.net.window_radius), radii=radii).values
    rows = []
    for radius, f_value, b_value in zip(radii, forward, backward, strict=True):
        lower = counting_lower_bound(fast.net, lattice, radius).value
        upper = max(f_value, b_value)
        rows.append(
            {
                "R": radius,
                "lower_fast": lower,
                "phi_fast_minus_s": fast_phi(radius) - gap,
                "upper_slow": upper,
                "phi_slow": slow_phi(radius),
                "gap": lower - upper,
                "ok": lower >= fast_phi(radius) - gap
                and upper <= slow_phi(radius) + RADIAL_TOLERANCE
                and lower > upper,
            }
        )
    return all(row["ok"] for row in rows), {"layer_gap": gap, "rows": rows}


def inverse_bound_calculus(_seed: int) -> tuple[bool, Details]:
    """g⁻¹ の厳密な曲線が R ≥ R₀ で C_φ·φ(R) 以下であることを検査します。"""
    built = sqrt_construction()
    mapping, _, _, phi = _radial_parts(built)
    forward = displacement_curve(mapping)
    inverse = displacement_curve(mapping.inverse(built.net.window_radius))
    threshold = half_threshold(phi)
    radii = [r for r in inverse.radii if r >= threshold]
    bound = inverse_curve_bound(forward, phi, radii=radii)
    excess = float(np.max(inverse.at_many(bound.radii) - np.asarray(bound.values)))
    factor = doubling_constant(phi, threshold / 2, forward.max_radius)
    return excess <= INVERSE_TOLERANCE, {
        "r0": threshold,
        "c_phi": bound.param("c_phi"),
        "c_phi_recomputed": factor,
        "samples": len(radii),
        "max_excess": excess,
    }


CRITERIA: dict[int, tuple[str, Callable[[int], tuple[bool, Details]]]] = {
    1: ("radial-upper-bound", radial_upper_bound),
    2: ("radial-lower-bound", radial_lower_bound),
    3: ("oracle-equivalence", oracle_equivalence),
    4: ("slope-certificate", slope_certificate),
    5: ("dyadic-placement", dyadic_placement_check),
    6: ("patch-bijection-bound", patch_bijection_bound),
    7: ("onedim-counterexample", onedim_counterexample_check),
    8: ("density-falsifier", density_falsifier),
    9: ("class-separation", class_separation),
    10: ("inverse-bound-calculus", inverse_bound_calculus),
}


def run_criterion(criterion_id: int, seed: int) -> CriterionResult:
    """基準を1つ実行します。ドメイン例外は失敗として詳細に記録します。

    Raises:
        KeyError: 基準番号が存在しない場合
    """
    name, check = CRITERIA[criterion_id]
    try:
        passed, details = check(seed)
    except NetLabError as exc:
        logger.warning("基準 %d で例外: %s", criterion_id, exc)
        passed, details = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CriterionResult(str(criterion_id), name, bool(passed), details)


# ============================================================================
# 故障注入
# ============================================================================


def _corrupted_profile() -> tuple[bool, Details]:
    _, _, profile, _ = _radial_parts(sqrt_construction())
    clean = slope_bounds_check(profile)
    inner = list(profile.inner)
    inner[1] = 2.0
    corrupted = RadialProfile(outer=profile.outer, inner=tuple(inner))
    report = slope_bounds_check(corrupted, ratio=clean.ratio, lower=clean.lower, upper=clean.upper)
    return (not report.ok and 1 in report.violations), {"violations": list(report.violations)}


def _swapped_matching() -> tuple[bool, Details]:
    sources = np.array([[0.0], [1.0]])
    targets = np.array([[0.0], [1.0]])
    optimal = bottleneck_bijection(sources, targets).bottleneck
    swapped = Matching(sources, targets[::-1]).bottleneck
    oracle = brute_force_bottleneck(sources, targets)
    return (optimal == oracle and swapped != oracle), {"swapped": swapped, "oracle": oracle}


def _dropped_patch_point() -> tuple[bool, Details]:
    patched = patched_net(DensityField.uniform(2), [2, 3], GrowthFunction.power(1.0, 10.0))
    layout = patched.layout
    first = layout.placements[0]
    broken = dataclasses.replace(first, points=first.points[:-1])
    placements = (broken, *layout.placements[1:])
    violations = layout_violations(dataclasses.replace(layout, placements=placements))
    return bool(violations), {"violations": violations}


def _broken_schedule() -> tuple[bool, Details]:
    try:
        RadiusSchedule(
            (16.0, 32.0), multiplier=4.0, ratio=4.0, layer_gap=1.0, phi=GrowthFunction.sqrt()
        )
    except ScheduleInfeasibleError as exc:
        return True, {"error": str(exc)}
    return False, {}


FAULTS: dict[str, tuple[str, Callable[[], tuple[bool, Details]]]] = {
    "F1": ("corrupted-profile", _corrupted_profile),
    "F2": ("swapped-matching", _swapped_matching),
    "F3": ("dropped-patch-point", _dropped_patch_point),
    "F4": ("broken-schedule", _broken_schedule),
}


def run_faults() -> list[CriterionResult]:
    """故障を注入し、各検査がそれを検出することを確かめます(passed は検出できたか)。"""
    results = []
    for fault_id, (name, inject) in FAULTS.items():
        detected, details = inject()
        logger.info("故障 %s (%s): %s", fault_id, name, "検出" if detected else "見逃し")
        results.append(CriterionResult(fault_id, name, detected, details))
    return results
