"""増加関数 φ, ψ, ζ の表現と計算。

このモジュールは、変位の尺度として使う増加関数を2つの族で表現します:
- power-log: φ(R) = a·R^β·(ln(e+R))^α + c₀
- table: 折れ線(経験的な曲線や凹包の結果)

評価・逆関数・倍増定数・凹包・凹性の検査を提供します。
有界性や o(R) 性は標本からは判定できないため、族のパラメータから宣言します。
"""

import logging
import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np

from src.domain.constants import (
    CONCAVITY_SAMPLES,
    CONCAVITY_TOLERANCE,
    DOUBLING_SAMPLES,
    INVERSE_MAX_ITERATIONS,
    INVERSE_MAX_RADIUS,
    INVERSE_REL_TOLERANCE,
)
from src.domain.errors import GrowthDomainError, GrowthRangeError, InvalidParameterError

logger = logging.getLogger(__name__)

#: 閾値探索の標本数
_THRESHOLD_SAMPLES = 4096


class GrowthFamily(StrEnum):
    """増加関数の族。"""

    POWER_LOG = "power-log"
    TABLE = "table"


@dataclass(frozen=True)
class GrowthFunction:
    """増加関数 φ。

    Attributes:
        family: 族
        a: 係数(power-log、a ≥ 0)
        beta: R の指数(power-log、β ≥ 0)
        alpha: ln(e+R) の指数(power-log)
        c0: 定数項(power-log、c₀ ≥ 0)
        points: 折れ線の折れ点 ((R, v), …)(table)
        domain_min: 定義域の下限。評価は R > domain_min でのみ可能
        label: 表示用のラベル

    Examples:
        >>> GrowthFunction.sqrt()(16.0)
        4.0
        >>> GrowthFunction.table([(1.0, 1.0), (10.0, 4.0)])(5.5)
        2.5
    """

    family: GrowthFamily
    a: float = 1.0
    beta: float = 0.0
    alpha: float = 0.0
    c0: float = 0.0
    points: tuple[tuple[float, float], ...] = ()
    domain_min: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        """パラメータを検証します。

        Raises:
            InvalidParameterError: パラメータが族の条件を満たさない場合
        """
        if self.domain_min < 0:
            msg = f"domain_min は非負である必要がありますが、{self.domain_min}です"
            raise InvalidParameterError(msg)
        if self.family == GrowthFamily.POWER_LOG:
            if self.a < 0 or self.beta < 0 or self.c0 < 0:
                msg = (
                    f"a, β, c₀ は非負である必要があります: "
                    f"a={self.a}, β={self.beta}, c₀={self.c0}"
                )
                raise InvalidParameterError(msg)
            return

        points = tuple((float(r), float(v)) for r, v in self.points)
        if len(points) < 2:  # noqa: PLR2004
            msg = "折れ線には2個以上の折れ点が必要です"
            raise InvalidParameterError(msg)
        radii = [r for r, _ in points]
        if any(b <= a for a, b in zip(radii, radii[1:], strict=False)):
            msg = f"折れ点の R は狭義単調増加である必要があります: {radii}"
            raise InvalidParameterError(msg)
        if any(v < 0 for _, v in points):
            msg = "折れ点の値は非負である必要があります"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "points", points)

    # ========================================================================
    # 名前付きコンストラクタ
    # ========================================================================

    @classmethod
    def power_log(
        cls, a: float = 1.0, beta: float = 0.0, alpha: float = 0.0, c0: float = 0.0, label: str = ""
    ) -> "GrowthFunction":
        return cls(GrowthFamily.POWER_LOG, a=a, beta=beta, alpha=alpha, c0=c0, label=label)

    @classmethod
    def constant(cls, value: float) -> "GrowthFunction":
        """有界な φ ≡ value(value = 0 も可)。"""
        return cls.power_log(a=0.0, c0=value, label=f"const:{value:g}")

    @classmethod
    def log(cls) -> "GrowthFunction":
        """φ(R) = ln(e+R)。"""
        return cls.power_log(alpha=1.0, label="log")

    @classmethod
    def sqrt(cls) -> "GrowthFunction":
        """φ(R) = √R。"""
        return cls.power_log(beta=0.5, label="sqrt")

    @classmethod
    def power(cls, beta: float, a: float = 1.0) -> "GrowthFunction":
        """φ(R) = a·R^β。"""
        return cls.power_log(a=a, beta=beta, label=f"power:{beta:g}")

    @classmethod
    def linear(cls) -> "GrowthFunction":
        """φ(R) = R。"""
        return cls.power_log(beta=1.0, label="linear")

    @classmethod
    def r_over_log(cls) -> "GrowthFunction":
        """φ(R) = R / ln(e+R)。"""
        return cls.power_log(beta=1.0, alpha=-1.0, label="r-over-log")

    @classmethod
    def table(cls, points: list[tuple[float, float]], label: str = "") -> "GrowthFunction":
        return cls(GrowthFamily.TABLE, points=tuple(points), label=label or "table")

    # ========================================================================
    # 宣言的な性質
    # ========================================================================

    @property
    def _tail_slope(self) -> float:
        (r1, v1), (r2, v2) = self.points[-2], self.points[-1]
        return max(0.0, (v2 - v1) / (r2 - r1))

    @property
    def is_bounded(self) -> bool:
        if self.family == GrowthFamily.TABLE:
            return self._tail_slope == 0.0
        return self.a == 0 or (self.beta == 0 and self.alpha <= 0)

    @property
    def is_sublinear(self) -> bool:
        """φ(R) ∈ o(R) が宣言されているか。"""
        if self.family == GrowthFamily.TABLE:
            return self._tail_slope == 0.0
        return self.a == 0 or self.beta < 1 or (self.beta == 1 and self.alpha < 0)

    @property
    def is_strictly_increasing(self) -> bool:
        if self.family == GrowthFamily.TABLE:
            values = [v for _, v in self.points]
            return all(b > a for a, b in zip(values, values[1:], strict=False)) and (
                self._tail_slope > 0
            )
        return (
            self.a > 0
            and (self.beta > 0 or self.alpha > 0)
            and (self.alpha >= 0 or self.beta + self.alpha >= 0)
        )

    # ========================================================================
    # 評価
    # ========================================================================

    def values(self, radii: np.ndarray) -> np.ndarray:
        """配列に対する評価(定義域の検査はしません)。"""
        r = np.asarray(radii, dtype=np.float64)
        if self.family == GrowthFamily.POWER_LOG:
            return self.a * r**self.beta * np.log(np.e + r) ** self.alpha + self.c0
        xs = np.array([p[0] for p in self.points])
        ys = np.array([p[1] for p in self.points])
        inside = np.interp(r, xs, ys)
        return np.where(r > xs[-1], ys[-1] + self._tail_slope * (r - xs[-1]), inside)

    def __call__(self, radius: float) -> float:
        return self.evaluate(radius)

    def evaluate(self, radius: float) -> float:
        """φ(R) を返します。

        Raises:
            GrowthDomainError: R ≤ domain_min の場合
        """
        if not radius > self.domain_min:
            msg = f"R={radius} は定義域 ({self.domain_min}, ∞) の外です"
            raise GrowthDomainError(msg)
        return float(self.values(np.array(radius)))

    def _infimum(self) -> float:
        """(domain_min, ∞) 上の下限値。"""
        if self.family == GrowthFamily.TABLE:
            return float(self.values(np.array(max(self.domain_min, self.points[0][0]))))
        return float(self.values(np.array(self.domain_min)))

    def inverse(self, value: float) -> float:
        """φ(R) = value となる R を返します。

        閉形式(α = 0, c₀ = 0)または折れ線の逆補間が使えない場合は、
        倍々で区間を広げてから二分法で |φ(R) − value| ≤ 1e-9·max(1, value) まで絞ります。

        Raises:
            GrowthRangeError: φ が狭義増加でない、または value が値域の外の場合

        Examples:
            >>> GrowthFunction.sqrt().inverse(4.0)
            16.0
        """
        if not self.is_strictly_increasing:
            msg = f"φ '{self.label}' は狭義増加ではないため逆関数を持ちません"
            raise GrowthRangeError(msg)
        if value <= self._infimum() or value > INVERSE_MAX_RADIUS:
            msg = f"値 {value} は φ '{self.label}' の値域の外です"
            raise GrowthRangeError(msg)

        if self.family == GrowthFamily.TABLE:
            xs = [p[0] for p in self.points]
            ys = [p[1] for p in self.points]
            if value > ys[-1]:
                return xs[-1] + (value - ys[-1]) / self._tail_slope
            return float(np.interp(value, ys, xs))
        if self.alpha == 0 and self.c0 == 0:
            return float((value / self.a) ** (1.0 / self.beta))

        tolerance = INVERSE_REL_TOLERANCE * max(1.0, value)
        lo = self.domain_min
        hi = max(1.0, 2.0 * self.domain_min)
        while float(self.values(np.array(hi))) < value:
            lo = hi
            hi *= 2.0
            if hi > INVERSE_MAX_RADIUS:
                msg = f"値 {value} に届く R が見つかりません"
                raise GrowthRangeError(msg)
        for _ in range(INVERSE_MAX_ITERATIONS):
            mid = 0.5 * (lo + hi)
            current = float(self.values(np.array(mid)))
            if abs(current - value) <= tolerance or hi - lo <= math.ulp(mid):
                return mid
            if current < value:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    # ========================================================================
    # シリアライズ
    # ========================================================================

    def to_dict(self) -> dict[str, Any]:
        if self.family == GrowthFamily.TABLE:
            return {
                "family": str(self.family),
                "points": [list(p) for p in self.points],
                "domain_min": self.domain_min,
                "label": self.label,
            }
        return {
            "family": str(self.family),
            "a": self.a,
            "beta": self.beta,
            "alpha": self.alpha,
            "c0": self.c0,
            "domain_min": self.domain_min,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GrowthFunction":
        family = GrowthFamily(data["family"])
        if family == GrowthFamily.TABLE:
            return cls(
                family,
                points=tuple((float(r), float(v)) for r, v in data["points"]),
                domain_min=float(data.get("domain_min", 0.0)),
                label=str(data.get("label", "")),
            )
        return cls(
            family,
            a=float(data["a"]),
            beta=float(data["beta"]),
            alpha=float(data["alpha"]),
            c0=float(data["c0"]),
            domain_min=float(data.get("domain_min", 0.0)),
            label=str(data.get("label", "")),
        )


@dataclass(frozen=True)
class ConcavityReport:
    """凹増加性の検査結果。

    Attributes:
        ok: 全ての三つ組で条件を満たしたか
        witness: 最初に条件を破った三つ組 (R₁, R₂, R₃)
    """

    ok: bool
    witness: tuple[float, float, float] | None = None


def doubling_constant(phi: GrowthFunction, r_lo: float, r_hi: float) -> float:
    """sup_{R ∈ [2R_lo, R_hi]} φ(R)/φ(R/2) を幾何標本で求めます。

    Raises:
        InvalidParameterError: R_hi > 2·R_lo > 0 でない、または φ(R/2) = 0 となる場合

    Examples:
        >>> round(doubling_constant(GrowthFunction.linear(), 1.0, 100.0), 12)
        2.0
    """
    if not (r_lo > 0 and r_hi > 2 * r_lo):
        msg = f"R_hi > 2·R_lo > 0 である必要があります: R_lo={r_lo}, R_hi={r_hi}"
        raise InvalidParameterError(msg)
    if not r_lo > phi.domain_min:
        msg = f"R_lo={r_lo} は φ の定義域の外です"
        raise GrowthDomainError(msg)
    radii = np.geomspace(2 * r_lo, r_hi, DOUBLING_SAMPLES)
    halves = phi.values(radii / 2)
    if np.any(halves <= 0):
        msg = "φ(R/2) = 0 となる標本があり倍増定数が定義できません"
        raise InvalidParameterError(msg)
    return float(np.max(phi.values(radii) / halves))


def half_threshold(phi: GrowthFunction) -> float:
    """R ≥ R₀ で φ(R) ≤ R/2 となる最小の R₀ を返します。

    Raises:
        GrowthRangeError: φ が o(R) と宣言されていない場合

    Examples:
        >>> half_threshold(GrowthFunction.sqrt())
        4.0
    """
    if not phi.is_sublinear:
        msg = f"φ '{phi.label}' は o(R) ではないため閾値 R₀ が存在しません"
        raise GrowthRangeError(msg)
    if phi.family == GrowthFamily.POWER_LOG and phi.alpha == 0 and phi.c0 == 0:
        if phi.a == 0:
            return phi.domain_min
        return max(phi.domain_min, float((2 * phi.a) ** (1.0 / (1.0 - phi.beta))))

    def gap(radius: float) -> float:
        return radius / 2 - float(phi.values(np.array(radius)))

    lo = max(phi.domain_min, 1e-9)
    hi = max(1.0, 2 * lo)
    while gap(hi) < 0 or gap(2 * hi) < gap(hi):
        hi *= 2
        if hi > INVERSE_MAX_RADIUS:
            msg = f"φ '{phi.label}' が R/2 を下回る点が見つかりません"
            raise GrowthRangeError(msg)
    grid = np.geomspace(lo, 2 * hi, _THRESHOLD_SAMPLES)
    negative = np.flatnonzero(grid / 2 - phi.values(grid) < 0)
    if len(negative) == 0:
        return lo
    left = float(grid[negative[-1]])
    right = float(grid[negative[-1] + 1])
    for _ in range(INVERSE_MAX_ITERATIONS):
        if right - left <= INVERSE_REL_TOLERANCE * max(1.0, right):
            break
        mid = 0.5 * (left + right)
        if gap(mid) < 0:
            left = mid
        else:
            right = mid
    return right


def concave_majorant(samples: list[tuple[float, float]], label: str = "") -> GrowthFunction:
    """標本点の上側凹包を折れ線として返します。

    最後の最大値までの上側凸包を取ります。最大値より右に標本があれば、そこから
    最後の標本まで水平に延ばし、その先も水平です。最大値が最後の標本なら右側は
    最後の傾きで延長します。

    Raises:
        InvalidParameterError: 標本が2個未満、R が狭義増加でない、または値が正でない場合

    Examples:
        >>> concave_majorant([(1.0, 1.0), (2.0, 3.0), (3.0, 1.0), (4.0, 5.0)]).points
        ((1.0, 1.0), (2.0, 3.0), (4.0, 5.0))
    """
    if len(samples) < 2:  # noqa: PLR2004
        msg = "凹包には2個以上の標本が必要です"
        raise InvalidParameterError(msg)
    pts = [(float(r), float(v)) for r, v in samples]
    if any(b[0] <= a[0] for a, b in zip(pts, pts[1:], strict=False)):
        msg = "標本の R は狭義単調増加である必要があります"
        raise InvalidParameterError(msg)
    if any(v <= 0 for _, v in pts):
        msg = "標本の値は正である必要があります"
        raise InvalidParameterError(msg)

    values = [v for _, v in pts]
    last_peak = len(values) - 1 - values[::-1].index(max(values))
    hull: list[tuple[float, float]] = []
    for point in pts[: last_peak + 1]:
        while len(hull) >= 2:  # noqa: PLR2004
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            cross = (ax - ox) * (point[1] - oy) - (ay - oy) * (point[0] - ox)
            if cross < 0:
                break
            hull.pop()
        hull.append(point)
    if last_peak < len(pts) - 1:
        hull.append((pts[-1][0], hull[-1][1]))
    return GrowthFunction.table(hull, label=label or "concave-majorant")


def check_concave_increasing(phi: GrowthFunction, r_lo: float, r_hi: float) -> ConcavityReport:
    """[R_lo, R_hi] 上で φ が凹かつ増加しているかを標本で検査します。

    折れ線は範囲内の折れ点と両端、それ以外は幾何標本で連続する三つ組を調べます。

    Raises:
        InvalidParameterError: R_hi ≤ R_lo の場合
        GrowthDomainError: R_lo が定義域の外の場合

    Examples:
        >>> check_concave_increasing(GrowthFunction.power(beta=2.0), 1.0, 100.0).ok
        False
    """
    if r_hi <= r_lo:
        msg = f"R_hi > R_lo である必要があります: R_lo={r_lo}, R_hi={r_hi}"
        raise InvalidParameterError(msg)
    if not r_lo > phi.domain_min:
        msg = f"R_lo={r_lo} は φ の定義域の外です"
        raise GrowthDomainError(msg)

    if phi.family == GrowthFamily.TABLE:
        inner = [r for r, _ in phi.points if r_lo < r < r_hi]
        radii = np.array([r_lo, *inner, r_hi])
    else:
        radii = np.geomspace(r_lo, r_hi, CONCAVITY_SAMPLES)
    values = phi.values(radii)
    slopes = np.diff(values) / np.diff(radii)
    for i in range(len(slopes) - 1):
        s1, s2 = slopes[i], slopes[i + 1]
        if s1 < -CONCAVITY_TOLERANCE or s2 < -CONCAVITY_TOLERANCE or s2 > s1 + CONCAVITY_TOLERANCE:
            witness = (float(radii[i]), float(radii[i + 1]), float(radii[i + 2]))
            logger.debug("凹増加性の違反: %s", witness)
            return ConcavityReport(ok=False, witness=witness)
    if len(slopes) == 1 and slopes[0] < -CONCAVITY_TOLERANCE:
        witness = (float(radii[0]), float(radii[1]), float(radii[1]))
        return ConcavityReport(ok=False, witness=witness)
    return ConcavityReport(ok=True)
