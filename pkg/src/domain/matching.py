"""窓上の最適ボトルネックマッチングと線形変位の全単射。

ボトルネック値は候補距離の二分探索で求め、各閾値での実行可能性は
最大二部マッチング(増加路法)で判定します。
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial import cKDTree

from src.domain.constants import (
    BALL_TOLERANCE,
    BOTTLENECK_CAP_NET_FACTOR,
    BOTTLENECK_MAX_DOUBLINGS,
    BRUTE_FORCE_MAX_SOURCES,
    DENSE_PAIR_LIMIT,
    SNAP_FRACTION,
)
from src.domain.displacement import counting_lower_bound, displacement_curve
from src.domain.errors import (
    IncompleteWindowError,
    InfeasibleUnderCapError,
    InvalidParameterError,
)
from src.domain.metric import as_points, distance_matrix, pair_distances, point_norms
from src.domain.models import (
    CurveKind,
    DisplacementCurve,
    ExplicitMap,
    Matching,
    NetCertificate,
    NetWindow,
    require_radius,
)
from src.domain.net_core import certify, layer_gap

logger = logging.getLogger(__name__)


def _candidate_edges(
    sources: np.ndarray, targets: np.ndarray, radius_cap: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """距離が radius_cap 以下の (始点, 終点, 距離) の組を返します。"""
    if math.isinf(radius_cap) or len(sources) * len(targets) <= DENSE_PAIR_LIMIT:
        distances = distance_matrix(sources, targets)
        rows, cols = np.nonzero(distances <= radius_cap)
        return rows, cols, distances[rows, cols]
    neighbours = cKDTree(targets).query_ball_point(sources, r=radius_cap)
    rows = np.repeat(np.arange(len(sources)), [len(n) for n in neighbours])
    cols = np.fromiter(itertools.chain.from_iterable(neighbours), dtype=np.intp, count=len(rows))
    return rows, cols, pair_distances(sources[rows], targets[cols])


def _assignment(rows: np.ndarray, cols: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """辺集合上の最大マッチング(各始点の相手、なければ −1)。"""
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=shape)
    return maximum_bipartite_matching(graph, perm_type="column")


def _search_thresholds(
    rows: np.ndarray,
    cols: np.ndarray,
    weights: np.ndarray,
    shape: tuple[int, int],
    feasible_bottleneck: float,
) -> np.ndarray:
    """二分探索で試す候補距離。

    下限は各始点(n = m なら各終点も)の最近の候補までの距離の最大値、
    上限は既に見つかった完全マッチングのボトルネック値です。
    """
    lower = np.full(shape[0], np.inf)
    np.minimum.at(lower, rows, weights)
    floor = float(lower.max())
    if shape[0] == shape[1]:
        target_lower = np.full(shape[1], np.inf)
        np.minimum.at(target_lower, cols, weights)
        floor = max(floor, float(target_lower.max()))
    thresholds = np.unique(weights)
    return thresholds[(thresholds >= floor) & (thresholds <= feasible_bottleneck)]


def _may_be_feasible(rows: np.ndarray, cols: np.ndarray, shape: tuple[int, int]) -> bool:
    """全ての始点に辺があり、辺の終点が n 個以上あるか(完全マッチングの必要条件)。"""
    return bool(np.unique(rows).size == shape[0] and np.unique(cols).size >= shape[0])


def bottleneck_bijection(
    sources: np.ndarray, targets: np.ndarray, radius_cap: float = math.inf
) -> Matching:
    """最大のペア距離を最小にする単射 sources → targets を返します。

    Args:
        sources: 始点 (n, d)
        targets: 終点 (m, d)(n ≤ m)
        radius_cap: 候補とする距離の上限

    Returns:
        最適な Matching(ボトルネック値は実現される距離のいずれか)

    Raises:
        InvalidParameterError: n > m の場合
        InfeasibleUnderCapError: radius_cap 以下の辺では完全マッチングが無い場合

    Examples:
        >>> matching = bottleneck_bijection([[0.0], [1.0]], [[0.4], [0.5]])
        >>> matching.bottleneck
        0.5
    """
    src = as_points(sources)
    dst = as_points(targets, src.shape[1])
    if len(src) > len(dst):
        msg = f"始点 {len(src)} 個は終点 {len(dst)} 個より多くできません"
        raise InvalidParameterError(msg)
    if len(src) == 0:
        return Matching(src, src.copy())

    rows, cols, weights = _candidate_edges(src, dst, radius_cap)
    shape = (len(src), len(dst))
    full = _assignment(rows, cols, shape)
    cardinality = int(np.count_nonzero(full >= 0))
    if cardinality < len(src):
        msg = f"上限 {radius_cap} 以下の辺では {cardinality}/{len(src)} 点しかマッチできません"
        raise InfeasibleUnderCapError(msg, max_cardinality=cardinality)

    feasible = float(weights[cols == full[rows]].max())
    thresholds = _search_thresholds(rows, cols, weights, shape, feasible)
    lo, hi = 0, len(thresholds) - 1
    best = full
    while lo < hi:
        mid = (lo + hi) // 2
        keep = weights <= thresholds[mid]
        if not _may_be_feasible(rows[keep], cols[keep], shape):
            lo = mid + 1
            continue
        trial = _assignment(rows[keep], cols[keep], shape)
        if np.all(trial >= 0):
            hi = mid
            best = trial
        else:
            lo = mid + 1
    if not np.all(best >= 0) or float(pair_distances(src, dst[best]).max()) > thresholds[lo]:
        keep = weights <= thresholds[lo]
        best = _assignment(rows[keep], cols[keep], shape)
    return Matching(src, dst[best])


def brute_force_bottleneck(sources: np.ndarray, targets: np.ndarray) -> float:
    """全ての単射を列挙してボトルネック値の最小を返します(検証用)。

    Raises:
        InvalidParameterError: 始点が8個を超える、または終点より多い場合

    Examples:
        >>> brute_force_bottleneck([[0.0], [1.0]], [[0.4], [0.5]])
        0.5
    """
    src = as_points(sources)
    dst = as_points(targets, src.shape[1])
    if len(src) > BRUTE_FORCE_MAX_SOURCES:
        msg = f"総当たりは始点 {BRUTE_FORCE_MAX_SOURCES} 個までです(指定 {len(src)} 個)"
        raise InvalidParameterError(msg)
    if len(src) > len(dst):
        msg = f"始点 {len(src)} 個は終点 {len(dst)} 個より多くできません"
        raise InvalidParameterError(msg)
    if len(src) == 0:
        return 0.0
    distances = distance_matrix(src, dst)
    perms = np.array(list(itertools.permutations(range(len(dst)), len(src))))
    return float(distances[np.arange(len(src)), perms].max(axis=1).min())


@dataclass(frozen=True)
class WindowBottleneck:
    """窓上のボトルネックマッチングの結果。

    Attributes:
        matching: Y ∩ B̄(0,R) から Z への最適マッチング
        radius: R
        reach: 終点の窓 R + cap(Z の窓で切り詰め)
        cap: 最終的に使った距離の上限
    """

    matching: Matching
    radius: float
    reach: float
    cap: float


def window_bottleneck(
    y_net: NetWindow,
    z_net: NetWindow,
    radius: float,
    cap: float | None = None,
    net_constant: float | None = None,
) -> WindowBottleneck:
    """Y ∩ B̄(0,R) から Z ∩ B̄(0, R + cap) への最適ボトルネックマッチング。

    cap の既定値は数え上げの下界 + 4·b(b は Z のネット定数)で、
    実行不可能なら Z の窓に達するまで cap を倍にします。cap = 0 からは
    Z の層間ギャップに広げてから倍にします。

    Raises:
        IncompleteWindowError: R が Y の窓を超える場合
        InfeasibleUnderCapError: Z の窓全体を使ってもマッチできない場合
    """
    require_radius(y_net, radius)
    sources = y_net.points[y_net.within(radius)]
    if cap is None:
        constant = certify(z_net).net_constant if net_constant is None else net_constant
        bound = counting_lower_bound(y_net, z_net, min(radius, z_net.window_radius)).value
        cap = bound + BOTTLENECK_CAP_NET_FACTOR * constant

    for _ in range(BOTTLENECK_MAX_DOUBLINGS):
        reach = min(radius + cap, z_net.window_radius)
        targets = z_net.points[z_net.within(reach)]
        try:
            matching = bottleneck_bijection(sources, targets, radius_cap=cap)
        except (InfeasibleUnderCapError, InvalidParameterError) as exc:
            if reach >= z_net.window_radius - BALL_TOLERANCE:
                raise InfeasibleUnderCapError(
                    str(exc), max_cardinality=getattr(exc, "max_cardinality", 0)
                ) from exc
            logger.debug("cap=%g では実行不可能なため倍にします", cap)
            cap = max(2 * cap, layer_gap(z_net) or z_net.window_radius)
            continue
        return WindowBottleneck(matching=matching, radius=radius, reach=reach, cap=cap)
    msg = f"cap を {BOTTLENECK_MAX_DOUBLINGS} 回倍にしてもマッチできません"
    raise InfeasibleUnderCapError(msg, max_cardinality=0)


def bottleneck_curve(  # noqa: PLR0913
    y_net: NetWindow,
    z_net: NetWindow,
    radii: list[float],
    net_constant: float | None = None,
    label: str = "bottleneck",
    skipped: list[tuple[float, str]] | None = None,
) -> DisplacementCurve:
    """各半径での窓最適ボトルネック値の曲線(窓ごとの最適値で、単調とは限りません)。

    Args:
        y_net: 始点側の窓
        z_net: 終点側の窓
        radii: 評価する半径
        net_constant: Z のネット定数(省略時は certify で計算)
        label: ラベル
        skipped: 指定した場合、計算できない半径を (R, 理由) として追加し、
            曲線からは除きます。省略時は例外を送出します

    Raises:
        IncompleteWindowError: R が Y の窓を超える場合(skipped 省略時)
        InfeasibleUnderCapError: Z の窓の中でマッチできない場合(skipped 省略時)
    """
    constant = certify(z_net).net_constant if net_constant is None else net_constant
    samples: list[float] = []
    values: list[float] = []
    for radius in sorted(set(float(r) for r in radii)):
        try:
            result = window_bottleneck(y_net, z_net, radius, net_constant=constant)
        except (IncompleteWindowError, InfeasibleUnderCapError) as exc:
            if skipped is None:
                raise
            skipped.append((radius, str(exc)))
            continue
        samples.append(radius)
        values.append(result.matching.bottleneck)
    return DisplacementCurve(
        radii=tuple(samples),
        values=tuple(values),
        kind=CurveKind.BOTTLENECK_OPTIMAL,
        label=label,
    )


@dataclass(frozen=True)
class LinearBijection:
    """線形変位の全単射の結果。

    Attributes:
        matching: 決定できたペア(窓の縁で決まらない点は含まない)
        forward_curve: disp_R(h)(R ≤ truncation_radius)
        inverse_curve: disp_R(h⁻¹)(R ≤ truncation_radius)
        constant: disp_R ≤ C·R を満たす最小の C(標本上)
        component_constant: 関係 E の辺で ‖x‖ ≤ C'‖y‖, ‖y‖ ≤ C'‖x‖ となる C'
        truncation_radius: この半径未満の点は両側とも全て対応が決まっている
        forward_scale: X → rY のスナップ倍率 r
        backward_scale: Y → r'X のスナップ倍率 r'
    """

    matching: Matching
    forward_curve: DisplacementCurve
    inverse_curve: DisplacementCurve
    constant: float
    component_constant: float
    truncation_radius: float
    forward_scale: float
    backward_scale: float


# 連鎖の起点の種類
_X_STOP, _Y_STOP, _CYCLE, _UNKNOWN = 0, 1, 2, 3
# 前者が無い / 窓の外で決まらない
_NONE, _UNDETERMINED = -1, -2


def _snap(points: np.ndarray, lattice: np.ndarray, scale: float) -> np.ndarray:
    """各点について scale·lattice の最も近い点の添字を返します。"""
    _, index = cKDTree(lattice * scale).query(points)
    return np.asarray(index, dtype=np.intp)


def _predecessors(
    images: np.ndarray, reliable: np.ndarray, size: int, certain: np.ndarray
) -> np.ndarray:
    """像の逆引き。無いことが確実なら _NONE、決まらないなら _UNDETERMINED。"""
    pred = np.where(certain, _NONE, _UNDETERMINED).astype(np.intp)
    owners = np.flatnonzero(reliable)
    pred[images[owners]] = owners
    return pred[:size]


def _chain_status(pred_x: np.ndarray, pred_y: np.ndarray) -> np.ndarray:
    """各 x について、前者をたどった連鎖の起点の種類を返します。"""
    status_x = np.full(len(pred_x), -1, dtype=np.intp)
    status_y = np.full(len(pred_y), -1, dtype=np.intp)
    for start in range(len(pred_x)):
        if status_x[start] >= 0:
            continue
        path: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        node = (0, start)
        result = _UNKNOWN
        while True:
            side, index = node
            known = status_x[index] if side == 0 else status_y[index]
            if known >= 0:
                result = int(known)
                break
            if node in seen:
                result = _CYCLE
                break
            seen.add(node)
            path.append(node)
            parent = pred_x[index] if side == 0 else pred_y[index]
            if parent == _NONE:
                result = _X_STOP if side == 0 else _Y_STOP
                break
            if parent == _UNDETERMINED:
                result = _UNKNOWN
                break
            node = (1 - side, int(parent))
        for side, index in path:
            if side == 0:
                status_x[index] = result
            else:
                status_y[index] = result
    return status_x


def _edge_ratio(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = point_norms(a), point_norms(b)
    both_zero = (na == 0) & (nb == 0)
    if np.any((na == 0) ^ (nb == 0)):
        return math.inf
    na, nb = na[~both_zero], nb[~both_zero]
    if len(na) == 0:
        return 0.0
    return float(max(np.max(na / nb), np.max(nb / na)))


def _linear_constant(curve: DisplacementCurve) -> float:
    ratios = [v / r for r, v in curve.rows() if r > 0]
    return max(ratios, default=0.0)


def linear_displacement_bijection(
    x_net: NetWindow,
    y_net: NetWindow,
    x_certificate: NetCertificate | None = None,
    y_certificate: NetCertificate | None = None,
) -> LinearBijection:
    """disp_R(h), disp_R(h⁻¹) ≤ C·R を満たす全単射 h: X → Y を窓の中で構成します。

    2rb_Y < s_X となる r で X を rY にスナップした単射 f_X と、同様の単射
    f_Y: Y → X を作り、両者のグラフの和 E の中で全単射を選びます
    (前者をたどった連鎖が Y 側で止まる点だけ f_Y⁻¹ を、それ以外は f_X を使う)。
    窓の縁で前者が決まらない点は対応させず、その最小ノルムを truncation_radius とします。
    """
    if x_net.dim != y_net.dim:
        msg = f"次元が一致しません: {x_net.dim} と {y_net.dim}"
        raise InvalidParameterError(msg)

    if x_net.points.shape == y_net.points.shape and np.array_equal(x_net.points, y_net.points):
        radius = min(x_net.window_radius, y_net.window_radius)
        inside = x_net.within(radius)
        matching = Matching(x_net.points[inside], x_net.points[inside])
        curve = displacement_curve(matching.as_map(radius, "h"))
        return LinearBijection(
            matching=matching,
            forward_curve=curve,
            inverse_curve=curve,
            constant=0.0,
            component_constant=1.0,
            truncation_radius=radius,
            forward_scale=1.0,
            backward_scale=1.0,
        )

    x_cert = certify(x_net) if x_certificate is None else x_certificate
    y_cert = certify(y_net) if y_certificate is None else y_certificate
    forward_scale = SNAP_FRACTION * x_cert.separation / (2 * y_cert.net_constant)
    backward_scale = SNAP_FRACTION * y_cert.separation / (2 * x_cert.net_constant)

    # f_X(x) は ‖x‖ ≤ reliable_x なら正しく、f_Y も同様
    reliable_x = min(
        forward_scale * (y_net.window_radius - y_cert.net_constant), x_net.window_radius
    )
    reliable_y = min(
        backward_scale * (x_net.window_radius - x_cert.net_constant), y_net.window_radius
    )
    # ここより内側の点に前者が無ければ、窓の外にも無い
    certain_x = reliable_y / backward_scale - x_cert.net_constant
    certain_y = reliable_x / forward_scale - y_cert.net_constant

    f_x = _snap(x_net.points, y_net.points, forward_scale)
    f_y = _snap(y_net.points, x_net.points, backward_scale)
    ok_x = x_net.norms <= reliable_x + BALL_TOLERANCE
    ok_y = y_net.norms <= reliable_y + BALL_TOLERANCE
    pred_x = _predecessors(f_y, ok_y, len(x_net), x_net.norms <= certain_x)
    pred_y = _predecessors(f_x, ok_x, len(y_net), y_net.norms <= certain_y)

    status = _chain_status(pred_x, pred_y)
    use_forward = ((status == _X_STOP) | (status == _CYCLE)) & ok_x
    use_backward = status == _Y_STOP
    images = np.full(len(x_net), -1, dtype=np.intp)
    images[use_forward] = f_x[use_forward]
    images[use_backward] = pred_x[use_backward]
    matched = images >= 0

    covered = np.zeros(len(y_net), dtype=bool)
    covered[images[matched]] = True
    loose = np.concatenate([x_net.norms[~matched], y_net.norms[~covered]])
    truncation = float(loose.min()) if len(loose) else min(x_net.window_radius, y_net.window_radius)
    truncation = min(truncation, x_net.window_radius, y_net.window_radius)
    if len(loose):
        logger.debug("窓の縁で %d 点の対応が決まりません(R < %g は完全)", len(loose), truncation)

    sources = x_net.points[matched]
    targets = y_net.points[images[matched]]
    matching = Matching(sources, targets, complete=bool(np.all(matched)))

    inner = max(truncation - BALL_TOLERANCE, 0.0)
    forward_map = ExplicitMap(sources, targets, inner, label="h")
    inverse_map = forward_map.inverse(inner, label="h⁻¹")
    forward_curve = displacement_curve(forward_map)
    inverse_curve = displacement_curve(inverse_map)

    component = max(
        _edge_ratio(x_net.points[ok_x], y_net.points[f_x[ok_x]]),
        _edge_ratio(y_net.points[ok_y], x_net.points[f_y[ok_y]]),
    )
    return LinearBijection(
        matching=matching,
        forward_curve=forward_curve,
        inverse_curve=inverse_curve,
        constant=max(_linear_constant(forward_curve), _linear_constant(inverse_curve)),
        component_constant=component,
        truncation_radius=truncation,
        forward_scale=forward_scale,
        backward_scale=backward_scale,
    )
