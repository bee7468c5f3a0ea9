"""区分線形な動径写像によるネットの再配置。

半径スケジュール R_i と、X の中で Z ∩ B̄(0, R_i + φ(R_i)) と同数の点を含む
最小の半径 R̄_i から、γ(R̄_i) = R_i を線形補間する動径プロファイル γ を作り、
g(x) = γ(‖x‖)·x/‖x‖ で Y = g(X) を構成します。
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from src.domain.constants import BALL_TOLERANCE, SLOPE_MARGIN, SLOPE_TOLERANCE
from src.domain.errors import (
    IncompleteWindowError,
    InvalidParameterError,
    PreconditionViolatedError,
)
from src.domain.growth import GrowthFunction
from src.domain.models import ExplicitMap, NetWindow
from src.domain.net_core import ball_count
from src.domain.schedule import RadiusSchedule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadialProfile:
    """折れ点 (R̄_i, R_i)(先頭は (0, 0))を線形補間する動径プロファイル γ。

    Attributes:
        outer: (0, R̄_1, …, R̄_n)
        inner: (0, R_1, …, R_n)
        tail_slope: R̄_n より外側の傾き。None なら最後の傾き c_n で延長します

    Examples:
        >>> profile = RadialProfile(outer=(0.0, 20.0, 272.0), inner=(0.0, 16.0, 256.0))
        >>> profile.slopes
        (0.8, 0.9523809523809523)
    """

    outer: tuple[float, ...]
    inner: tuple[float, ...]
    tail_slope: float | None = None

    def __post_init__(self) -> None:
        outer = tuple(float(v) for v in self.outer)
        inner = tuple(float(v) for v in self.inner)
        if len(outer) != len(inner) or len(outer) < 2:  # noqa: PLR2004
            msg = "折れ点は (0, 0) を含めて2個以上、両座標で同数である必要があります"
            raise InvalidParameterError(msg)
        if outer[0] != 0 or inner[0] != 0:
            msg = "最初の折れ点は (0, 0) である必要があります"
            raise InvalidParameterError(msg)
        for name, seq in (("R̄", outer), ("R", inner)):
            if any(b <= a for a, b in zip(seq, seq[1:], strict=False)):
                msg = f"{name} の列は狭義単調増加である必要があります: {seq}"
                raise InvalidParameterError(msg)
        if self.tail_slope is not None and self.tail_slope <= 0:
            msg = f"延長部分の傾きは正である必要があります: {self.tail_slope}"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "inner", inner)

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.outer, self.inner, strict=True))

    @cached_property
    def slopes(self) -> tuple[float, ...]:
        """c_i = (R_i − R_{i−1}) / (R̄_i − R̄_{i−1})。"""
        return tuple(
            (self.inner[i] - self.inner[i - 1]) / (self.outer[i] - self.outer[i - 1])
            for i in range(1, len(self.outer))
        )

    def gamma(self, radii: np.ndarray) -> np.ndarray:
        """γ を配列に適用します。"""
        r = np.asarray(radii, dtype=np.float64)
        slope = self.slopes[-1] if self.tail_slope is None else self.tail_slope
        beyond = self.inner[-1] + slope * (r - self.outer[-1])
        return np.where(r > self.outer[-1], beyond, np.interp(r, self.outer, self.inner))

    def __call__(self, radius: float) -> float:
        return float(self.gamma(np.array(radius)))


@dataclass(frozen=True)
class RadialRescale:
    """radial_rescale の結果。

    Attributes:
        net: 再配置後のネット Y
        profile: 動径プロファイル γ
        mapping: 対応 x ↦ g(x)
    """

    net: NetWindow
    profile: RadialProfile
    mapping: ExplicitMap


@dataclass(frozen=True)
class SlopeReport:
    """傾きの上下界の検査結果。

    Attributes:
        ok: すべての傾きが範囲内か
        ratio: 使用した K
        lower: 推定した L
        upper: 推定した U
        slope_min: 下界 (K−1)/(KU)
        slope_max: 上界 K/(LK−U)
        slopes: 各区間の傾き c_1, …, c_n
        violations: 範囲外の区間番号(1 始まり)
    """

    ok: bool
    ratio: float
    lower: float
    upper: float
    slope_min: float
    slope_max: float
    slopes: tuple[float, ...]
    violations: tuple[int, ...]


def rbar(x_net: NetWindow, z_net: NetWindow, radius: float, phi: GrowthFunction) -> float:
    """R̄ = min{r : |X ∩ B̄(0,r)| ≥ |Z ∩ B̄(0, R+φ(R))|} を返します。

    Z と X が同一オブジェクトなら R + φ(R) をそのまま返します。
    それ以外は、最小値は X が実現するノルムで達成されるので、
    ソート済みノルムの (必要数)番目を返します。

    Raises:
        IncompleteWindowError: R + φ(R) が Z の窓を超える、または
            必要な点数が X の窓に収まらない場合

    Examples:
        >>> from src.domain.net_core import integer_lattice_window
        >>> lattice = integer_lattice_window(dim=2, window_radius=30.0)
        >>> rbar(lattice, lattice, 16.0, GrowthFunction.sqrt())
        20.0
    """
    reach = radius + phi(radius)
    if z_net is x_net:
        return reach
    need = ball_count(z_net, reach)
    if need == 0:
        return 0.0
    if need > len(x_net):
        msg = f"X の窓 '{x_net.label}' には {need} 点が収まりません(窓内 {len(x_net)} 点)"
        raise IncompleteWindowError(msg)
    return float(x_net.sorted_norms[need - 1])


def fit_schedule(
    x_net: NetWindow, z_net: NetWindow, phi: GrowthFunction, schedule: RadiusSchedule
) -> RadiusSchedule:
    """R̄_i が X の窓に収まる最長の先頭部分にスケジュールを切り詰めます。

    Raises:
        IncompleteWindowError: R̄_1 すら窓に収まらない場合
    """
    count = 0
    for radius in schedule.radii:
        try:
            outer = rbar(x_net, z_net, radius, phi)
            if z_net is not x_net:
                ball_count(z_net, radius + phi(radius))
        except IncompleteWindowError:
            break
        if outer > x_net.window_radius + BALL_TOLERANCE:
            break
        count += 1
    if count == 0:
        msg = f"R̄_1 が X の窓 '{x_net.label}'(半径 {x_net.window_radius})に収まりません"
        raise IncompleteWindowError(msg)
    if count < len(schedule):
        logger.debug("スケジュールを %d 個から %d 個に切り詰めます", len(schedule), count)
    return schedule.truncated(count)


def radial_rescale(
    x_net: NetWindow,
    z_net: NetWindow,
    phi: GrowthFunction,
    schedule: RadiusSchedule,
    *,
    extend_tail: bool = False,
) -> RadialRescale:
    """X を動径プロファイル γ で再配置した Y と写像 g を返します。

    Args:
        x_net: 元のネット X
        z_net: 比較対象のネット Z(X と同一オブジェクトでもよい)
        phi: 尺度 φ
        schedule: 半径スケジュール(R̄_n が X の窓に収まること)
        extend_tail: True なら γ を R̄_n より外側へ傾き 1 で延長し、X の窓全体を写します

    Returns:
        RadialRescale。Y の窓半径は γ(R̄_n)(延長時は γ(X の窓半径))

    Raises:
        IncompleteWindowError: R̄_n が X の窓を超える場合
    """
    outer = [0.0] + [rbar(x_net, z_net, r, phi) for r in schedule.radii]
    if outer[-1] > x_net.window_radius + BALL_TOLERANCE:
        msg = f"R̄_n={outer[-1]} が X の窓の半径 {x_net.window_radius} を超えています"
        raise IncompleteWindowError(msg)
    profile = RadialProfile(
        outer=tuple(outer),
        inner=(0.0, *schedule.radii),
        tail_slope=1.0 if extend_tail else None,
    )
    if z_net is x_net and any(c > 1 + SLOPE_TOLERANCE for c in profile.slopes):
        logger.warning("Z = X なのに傾きが 1 を超えています: %s", profile.slopes)

    limit = x_net.window_radius if extend_tail else min(outer[-1], x_net.window_radius)
    inside = x_net.within(limit)
    sources = x_net.points[inside]
    norms = x_net.norms[inside]
    factors = np.divide(
        profile.gamma(norms), norms, out=np.zeros_like(norms), where=norms > 0
    )
    targets = sources * factors[:, None]

    net = NetWindow(
        dim=x_net.dim,
        points=targets,
        window_radius=profile(limit),
        label=f"radial[{phi.label}]({x_net.label})",
    )
    mapping = ExplicitMap(sources=sources, targets=targets, domain_radius=limit, label="g")
    return RadialRescale(net=net, profile=profile, mapping=mapping)


def slope_bounds_check(
    profile: RadialProfile,
    ratio: float | None = None,
    lower: float | None = None,
    upper: float | None = None,
) -> SlopeReport:
    """傾き c_i が (K−1)/(KU) ≤ c_i ≤ K/(LK−U) を満たすかを検査します。

    L, U を省略した場合は R̄_i/R_i の最小値・最大値に 10% の余裕を取って推定し、
    K を省略した場合は K = 2U/L とします。

    Raises:
        PreconditionViolatedError: K ≤ U/L の場合(witness は (K, U/L))
    """
    quotients = [o / i for o, i in zip(profile.outer[1:], profile.inner[1:], strict=True)]
    low = (1 - SLOPE_MARGIN) * min(quotients) if lower is None else lower
    high = (1 + SLOPE_MARGIN) * max(quotients) if upper is None else upper
    k = 2 * high / low if ratio is None else ratio
    if k <= high / low:
        msg = f"K > U/L である必要があります: K={k}, U/L={high / low}"
        raise PreconditionViolatedError(msg, witness=(k, high / low))

    slope_min = (k - 1) / (k * high)
    slope_max = k / (low * k - high)
    violations = tuple(
        index
        for index, c in enumerate(profile.slopes, start=1)
        if c < slope_min - SLOPE_TOLERANCE or c > slope_max + SLOPE_TOLERANCE
    )
    return SlopeReport(
        ok=not violations,
        ratio=k,
        lower=low,
        upper=high,
        slope_min=slope_min,
        slope_max=slope_max,
        slopes=profile.slopes,
        violations=violations,
    )
