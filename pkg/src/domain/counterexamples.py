"""具体的な反例となるネット。

- 1次元の例: X = 2ℤ ∪ {ψ(n) : n ≥ 2}, Y = ℤ ∪ {ψ(n) : n ≥ 1} と全単射
  f(x) = x/2 (x ∈ 2ℤ), f(ψ(n)) = ψ(n−1)。f の変位は O(R) だが、
  f⁻¹ の変位は ζ より速く増大する。
- 半空間の例: {x₁ ≥ 0} に c^{-1/d}ℤ^d、{x₁ < 0} に (2−c)^{-1/d}ℤ^d を置いたネット。
  自然密度は 1 だが、計数測度は一様測度に弱収束しない。
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from src.domain.errors import InvalidParameterError, PreconditionViolatedError
from src.domain.growth import GrowthFunction
from src.domain.models import ExplicitMap, NetWindow
from src.domain.net_core import integer_lattice_window

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class OneDimCounterexample:
    """1次元の例の窓と写像。

    Attributes:
        x_net: X の窓(半径 ψ(n_max))
        y_net: Y の窓(半径 ψ(n_max)/2)
        mapping: f: X → Y
        psi: ψ(1), …, ψ(n_max)(厳密な半整数)
    """

    x_net: NetWindow
    y_net: NetWindow
    mapping: ExplicitMap
    psi: tuple[Fraction, ...]


def half_integer_recurrence(zeta: GrowthFunction, n_max: int) -> tuple[Fraction, ...]:
    """ψ(1) = 1/2、ψ(n) = ψ(n−1) + n·ζ(ψ(n−1)) 以上の最小の 1/2 + ℕ の元。

    Raises:
        InvalidParameterError: n_max < 1 の場合

    Examples:
        >>> [str(v) for v in half_integer_recurrence(GrowthFunction.linear(), 4)]
        ['1/2', '3/2', '13/2', '65/2']
    """
    if n_max < 1:
        msg = f"n_max は1以上である必要がありますが、{n_max}が指定されました"
        raise InvalidParameterError(msg)
    values = [HALF]
    for n in range(2, n_max + 1):
        previous = values[-1]
        bound = previous + n * Fraction(zeta(float(previous)))
        values.append(math.ceil(bound - HALF) + HALF)
    return tuple(values)


def onedim_counterexample(zeta: GrowthFunction, n_max: int) -> OneDimCounterexample:
    """1次元の例 X, Y と全単射 f を窓の中で構成します。

    X の窓は ψ(n_max)、Y の窓はその半分です。f は X の窓から Y の窓への全単射に
    なります(ψ(n_max−1) ≤ ψ(n_max)/2 が必要)。

    Raises:
        InvalidParameterError: n_max < 2 の場合
        PreconditionViolatedError: ψ(n_max−1) > ψ(n_max)/2 の場合
    """
    if n_max < 2:  # noqa: PLR2004
        msg = f"n_max は2以上である必要がありますが、{n_max}が指定されました"
        raise InvalidParameterError(msg)
    psi = half_integer_recurrence(zeta, n_max)
    x_radius = psi[-1]
    y_radius = x_radius / 2
    if psi[-2] > y_radius:
        msg = f"ψ(n_max−1) = {psi[-2]} が Y の窓 {y_radius} に収まりません"
        raise PreconditionViolatedError(msg, witness=float(psi[-2]))

    evens = integer_lattice_window(1, float(x_radius), scale=2.0).points
    spikes = np.array([[float(v)] for v in psi[1:]])
    x_points = np.concatenate([evens, spikes])
    y_points = np.concatenate(
        [
            integer_lattice_window(1, float(y_radius)).points,
            np.array([[float(v)] for v in psi if v <= y_radius]),
        ]
    )
    images = np.concatenate([evens / 2, np.array([[float(v)] for v in psi[:-1]])])

    x_net = NetWindow(dim=1, points=x_points, window_radius=float(x_radius), label="X")
    y_net = NetWindow(dim=1, points=y_points, window_radius=float(y_radius), label="Y")
    mapping = ExplicitMap(
        sources=x_points, targets=images, domain_radius=float(x_radius), label="f"
    )
    return OneDimCounterexample(x_net=x_net, y_net=y_net, mapping=mapping, psi=psi)


def halfspace_net(c: float, dim: int, window_radius: float) -> NetWindow:
    """半空間ネット (c^{-1/d}ℤ^d ∩ H⁺) ∪ ((2−c)^{-1/d}ℤ^d ∩ H⁻) を返します。

    H = {x₁ = 0}, H⁺ = {x₁ ≥ 0} に固定します。

    Raises:
        InvalidParameterError: c が開区間 (1, 2) の外の場合
    """
    if not 1 < c < 2:  # noqa: PLR2004
        msg = f"c は開区間 (1, 2) 内である必要がありますが、{c}が指定されました"
        raise InvalidParameterError(msg)
    dense = integer_lattice_window(dim, window_radius, scale=c ** (-1.0 / dim)).points
    sparse = integer_lattice_window(dim, window_radius, scale=(2.0 - c) ** (-1.0 / dim)).points
    points = np.concatenate([dense[dense[:, 0] >= 0], sparse[sparse[:, 0] < 0]])
    return NetWindow(dim=dim, points=points, window_radius=window_radius, label=f"halfspace[c={c}]")
