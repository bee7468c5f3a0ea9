"""変位曲線とその上下界。

- displacement_curve: 写像の厳密な曲線 R ↦ disp_R(f)
- counting_lower_bound: 点数の比較による、すべての単射に対する下界
- compose_curves: 合成写像の曲線の上界 disp_{R+f(R)}(g) + f(R)
- inverse_curve_bound: φ(R) ∈ o(R) のときの逆写像の上界 C_φ·φ(R)
"""

import logging

import numpy as np

from src.domain.constants import BALL_TOLERANCE
from src.domain.errors import (
    IncompleteMapError,
    IncompleteWindowError,
    InvalidParameterError,
    PreconditionViolatedError,
)
from src.domain.growth import GrowthFunction, doubling_constant, half_threshold
from src.domain.metric import point_norms
from src.domain.models import (
    CountingBound,
    CurveKind,
    DisplacementCurve,
    ExplicitMap,
    Matching,
    NetWindow,
    require_radius,
)
from src.domain.net_core import ball_count

logger = logging.getLogger(__name__)


def identity_map(window: NetWindow) -> ExplicitMap:
    return ExplicitMap(window.points, window.points, window.window_radius, label="id")


def translation_map(window: NetWindow, vector: tuple[float, ...]) -> ExplicitMap:
    """x ↦ x + v(像は窓の外に出てもよい)。"""
    shift = np.asarray(vector, dtype=np.float64)
    if shift.shape != (window.dim,):
        msg = f"平行移動ベクトルの次元が {window.dim} ではありません: {vector}"
        raise InvalidParameterError(msg)
    label = f"+{vector}"
    return ExplicitMap(window.points, window.points + shift, window.window_radius, label=label)


def displacement_curve(
    mapping: ExplicitMap,
    radii: list[float] | None = None,
    origin: tuple[float, ...] | None = None,
    label: str | None = None,
) -> DisplacementCurve:
    """disp_R(f) = max{‖f(x) − x‖ : ‖x − o‖ ≤ R} の曲線を返します(空の球では 0)。

    Args:
        mapping: 写像
        radii: 評価する半径(省略時は実現されたノルムと定義域の半径)
        origin: 基準点 o(省略時は原点)
        label: ラベル

    Raises:
        IncompleteMapError: B̄(o, R) が写像の定義域 B̄(0, domain_radius) に収まらない場合

    Examples:
        >>> from src.domain.net_core import integer_lattice_window
        >>> evens = integer_lattice_window(dim=1, window_radius=10.0, scale=2.0)
        >>> halving = ExplicitMap(evens.points, evens.points / 2, 10.0)
        >>> displacement_curve(halving, radii=[10.0]).values
        (5.0,)
    """
    center = np.zeros(mapping.dim) if origin is None else np.asarray(origin, dtype=np.float64)
    limit = mapping.domain_radius - float(np.linalg.norm(center))
    norms = point_norms(mapping.sources - center)

    if radii is None:
        realized = norms[norms <= limit + BALL_TOLERANCE]
        samples = np.unique(np.concatenate([realized, [limit]])) if limit >= 0 else np.array([])
    else:
        samples = np.unique(np.asarray(radii, dtype=np.float64))
        if len(samples) and samples[-1] > limit + BALL_TOLERANCE:
            msg = (
                f"半径 {samples[-1]} の球で写像 '{mapping.label}' の像が揃っていません"
                f"(上限 {limit})"
            )
            raise IncompleteMapError(msg)

    order = np.argsort(norms, kind="stable")
    positions = np.searchsorted(norms[order], samples + BALL_TOLERANCE, side="right")
    if len(order):
        running = np.maximum.accumulate(mapping.displacements[order])
        values = np.where(positions > 0, running[np.maximum(positions - 1, 0)], 0.0)
    else:
        values = np.zeros(len(samples))
    return DisplacementCurve(
        radii=tuple(samples.tolist()),
        values=tuple(np.asarray(values, dtype=np.float64).tolist()),
        kind=CurveKind.EXACT,
        label=mapping.label if label is None else label,
        params=()
        if origin is None
        else tuple((f"origin_{i}", float(v)) for i, v in enumerate(center)),
    )


def matching_curve(
    matching: Matching, radii: list[float] | None = None, label: str = "matching"
) -> DisplacementCurve:
    """マッチングを写像とみなした変位曲線(定義域は始点の最大ノルム)。"""
    reach = float(point_norms(matching.sources).max()) if len(matching) else 0.0
    return displacement_curve(matching.as_map(reach, label), radii=radii, label=label)


def counting_lower_bound(y_net: NetWindow, z_net: NetWindow, radius: float) -> CountingBound:
    """すべての単射 f: Y → Z に対する disp_R(f) の下界を返します。

    |Y ∩ B̄(0,R)| = n なら、少なくとも1点は Z の n 番目に小さいノルム ρ 以上の
    点に写るので、disp_R(f) ≥ ρ − R が成り立ちます。
    Z の窓に n 点が無い場合は、窓で打ち切った値を truncated として返します。

    Raises:
        IncompleteWindowError: R が Y または Z の窓を超える場合

    Examples:
        >>> from src.domain.net_core import integer_lattice_window
        >>> halves = integer_lattice_window(dim=1, window_radius=30.0, scale=0.5)
        >>> integers = integer_lattice_window(dim=1, window_radius=30.0)
        >>> counting_lower_bound(halves, integers, 10.0).value
        10.0
    """
    require_radius(y_net, radius)
    cap = z_net.window_radius - radius
    if cap < -BALL_TOLERANCE:
        msg = f"半径 {radius} は Z の窓 {z_net.window_radius} を超えています"
        raise IncompleteWindowError(msg)
    cap = max(cap, 0.0)
    need = ball_count(y_net, radius)
    if need == 0:
        return CountingBound(radius=radius, value=0.0, validity_cap=cap)
    if need > len(z_net):
        return CountingBound(radius=radius, value=cap, validity_cap=cap, truncated=True)
    value = max(0.0, float(z_net.sorted_norms[need - 1]) - radius)
    return CountingBound(radius=radius, value=value, validity_cap=cap)


def counting_lower_curve(
    y_net: NetWindow, z_net: NetWindow, radii: list[float], label: str = "counting"
) -> DisplacementCurve:
    """counting_lower_bound の累積最大を曲線にします(disp_R は R について単調)。"""
    samples = sorted(set(float(r) for r in radii))
    bounds = [counting_lower_bound(y_net, z_net, r) for r in samples]
    values = np.maximum.accumulate([b.value for b in bounds]) if bounds else []
    return DisplacementCurve(
        radii=tuple(samples),
        values=tuple(float(v) for v in values),
        kind=CurveKind.COUNTING_LOWER_BOUND,
        label=label,
        truncated=any(b.truncated for b in bounds),
    )


def compose_curves(
    f_curve: DisplacementCurve, g_curve: DisplacementCurve, label: str = "g∘f bound"
) -> DisplacementCurve:
    """合成 g∘f の変位の上界 g(R + f(R)) + f(R) を返します。

    g の曲線が R + f(R) まで定義されていない半径からは打ち切り、truncated を立てます。

    Examples:
        >>> a = DisplacementCurve((1.0, 2.0), (1.0, 1.0), CurveKind.ANALYTIC_UPPER_BOUND)
        >>> b = DisplacementCurve((1.0, 5.0), (2.0, 2.0), CurveKind.ANALYTIC_UPPER_BOUND)
        >>> compose_curves(a, b).values
        (3.0, 3.0)
    """
    radii: list[float] = []
    truncated = False
    for radius, shift in f_curve.rows():
        if radius + shift > g_curve.max_radius + BALL_TOLERANCE:
            truncated = True
            break
        radii.append(radius)
    shifts = np.asarray(f_curve.values[: len(radii)], dtype=np.float64)
    reach = np.asarray(radii, dtype=np.float64) + shifts
    values = [float(v) for v in g_curve.at_many(reach) + shifts]
    if truncated:
        logger.debug("合成の上界を R=%s で打ち切りました", radii[-1] if radii else None)
    return DisplacementCurve(
        radii=tuple(radii),
        values=tuple(values),
        kind=CurveKind.ANALYTIC_UPPER_BOUND,
        label=label,
        truncated=truncated,
    )


def inverse_curve_bound(
    f_curve: DisplacementCurve,
    phi: GrowthFunction,
    radii: list[float] | None = None,
    label: str = "inverse bound",
) -> DisplacementCurve:
    """disp_R(f) ≤ φ(R) のとき、R ≥ R₀ で disp_R(f⁻¹) ≤ C_φ·φ(R) を返します。

    R₀ は φ(R) ≤ R/2 となる閾値、C_φ は [R₀/2, 曲線の定義域] 上の倍増定数です。

    Args:
        f_curve: f の曲線
        phi: 尺度 φ(o(R) と宣言されていること)
        radii: 上界を評価する半径(省略時は f_curve の半径のうち R₀ 以上)
        label: ラベル

    Raises:
        PreconditionViolatedError: φ が o(R) でない、または f_curve が φ を超える場合
            (witness は超えた半径)
    """
    if not phi.is_sublinear:
        msg = f"φ '{phi.label}' は o(R) と宣言されていません"
        raise PreconditionViolatedError(msg)
    sampled = np.asarray(f_curve.radii, dtype=np.float64)
    inside = sampled > phi.domain_min
    radii_in = sampled[inside]
    bounds = phi.values(radii_in)
    observed = np.asarray(f_curve.values, dtype=np.float64)[inside]
    exceeded = np.flatnonzero(observed > bounds + BALL_TOLERANCE * np.maximum(1.0, bounds))
    if exceeded.size:
        first = int(exceeded[0])
        radius, value, bound = float(radii_in[first]), observed[first], bounds[first]
        msg = f"R={radius} で disp_R(f)={value} > φ(R)={bound} です"
        raise PreconditionViolatedError(msg, witness=radius)

    threshold = half_threshold(phi)
    lower = max(threshold / 2, phi.domain_min + BALL_TOLERANCE, BALL_TOLERANCE)
    upper = max(f_curve.max_radius, 4 * lower)
    factor = doubling_constant(phi, lower, upper)

    samples = f_curve.radii if radii is None else tuple(sorted(set(float(r) for r in radii)))
    kept = [r for r in samples if r >= threshold and r > phi.domain_min]
    return DisplacementCurve(
        radii=tuple(kept),
        values=tuple(float(v) for v in factor * phi.values(np.asarray(kept, dtype=np.float64))),
        kind=CurveKind.ANALYTIC_UPPER_BOUND,
        label=label,
        params=(("c_phi", factor), ("r0", threshold)),
    )
