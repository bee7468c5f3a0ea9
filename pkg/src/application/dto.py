"""アプリケーション層のDTO (Data Transfer Object)。

このモジュールは、CLI フラグと JSON 設定ファイルの入力検証のための
DTOモデルを定義します。すべてのモデルは未知のキーを拒否し、
JSON に書き出して読み直すと同じ設定に戻ります。
"""

import json
import re
from pathlib import Path
from typing import Any, Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_serializer,
    model_validator,
)

from src.domain.constants import (
    DEFAULT_GRID_POINTS,
    DEFAULT_RATIO,
    DEFAULT_SCHEDULE_LENGTH,
    DEFAULT_SEED,
)
from src.domain.density import DensityField
from src.domain.growth import GrowthFunction

#: 検証スイートの名前(数字のカンマ区切りも可)
SUITE_NAMES = ("default", "oracle", "faults")

#: 受け入れ基準の番号の範囲
CRITERION_IDS = range(1, 11)

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def _parse_numbers(text: str, count: range, name: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in count or not all(re.fullmatch(_NUMBER, p) for p in parts):
        msg = f"'{name}' のパラメータが不正です: '{text}'"
        raise ValueError(msg)
    return [float(p) for p in parts]


def parse_growth(expression: str) -> GrowthFunction:
    """増加関数の表記を GrowthFunction に変換します。

    受け付ける表記:
    sqrt, log, linear, r-over-log, const:K, power:β[,a], power-log:a,β,α,c₀

    Raises:
        ValueError: 表記が不正な場合

    Examples:
        >>> parse_growth("power:1,25")(2.0)
        50.0
        >>> parse_growth("const:3").is_bounded
        True
    """
    name, _, params = expression.strip().partition(":")
    simple = {
        "sqrt": GrowthFunction.sqrt,
        "log": GrowthFunction.log,
        "linear": GrowthFunction.linear,
        "r-over-log": GrowthFunction.r_over_log,
    }
    if name in simple and not params:
        return simple[name]()
    if name == "const":
        (value,) = _parse_numbers(params, range(1, 2), name)
        return GrowthFunction.constant(value)
    if name == "power":
        values = _parse_numbers(params, range(1, 3), name)
        return GrowthFunction.power(*values)
    if name == "power-log":
        a, beta, alpha, c0 = _parse_numbers(params, range(4, 5), name)
        return GrowthFunction.power_log(a, beta, alpha, c0, label=expression)
    msg = f"増加関数の表記 '{expression}' を解釈できません"
    raise ValueError(msg)


class PhiSpec(BaseModel):
    """増加関数の表記。

    JSON では文字列 ("sqrt" など) として読み書きします。

    Attributes:
        expression: parse_growth が受け付ける表記

    Examples:
        >>> PhiSpec.model_validate("sqrt").build()(16.0)
        4.0
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    expression: str = Field(description="増加関数の表記")

    @model_validator(mode="before")
    @classmethod
    def _from_string(cls, data: Any) -> Any:
        if isinstance(data, str):
            return {"expression": data}
        return data

    @field_validator("expression")
    @classmethod
    def validate_expression(cls, v: str) -> str:
        """表記が解釈できることを検証します。"""
        parse_growth(v)
        return v

    @model_serializer
    def _to_string(self) -> str:
        return self.expression

    def build(self) -> GrowthFunction:
        return parse_growth(self.expression)


class DensitySpec(BaseModel):
    """パッチ付きネットの密度 ρ。

    Attributes:
        kind: "uniform" または "checkerboard"
        cells: 市松模様の各軸の分割数
        low: 偶数セルの値
        high: 奇数セルの値
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["uniform", "checkerboard"] = "uniform"
    cells: int = Field(default=2, ge=1, description="各軸の分割数")
    low: float = Field(default=0.5, gt=0)
    high: float = Field(default=1.5, gt=0)

    def build(self, dim: int) -> DensityField:
        if self.kind == "uniform":
            return DensityField.uniform(dim)
        return DensityField.checkerboard(dim, self.cells, self.low, self.high)


class NetSpec(BaseModel):
    """生成するネットの族とパラメータ。

    Attributes:
        family: lattice / radial / patched / halfspace / onedim
        dim: 次元
        radius: 窓の半径 R_max(onedim では無視され ψ(n_max) になります)
        scale: 格子の間隔(lattice)
        phi: 尺度 φ(radial)
        ratio: スケジュールの比 K(radial)
        schedule_n: スケジュールの長さ n(radial)
        extend_tail: γ を R̄_n より外側へ傾き 1 で延長するか(radial)
        reference_scale: 比較対象 Z = s·ℤ^d の間隔 s(radial、1 なら Z = X)
        sides: 立方体の辺 l_k(patched)
        psi: 領域間の距離 ψ(patched)
        density: 密度 ρ(patched)
        c: 半空間の密度(halfspace、1 < c < 2)
        zeta: 増大の尺度 ζ(onedim)
        n_max: ψ の項数(onedim)
    """

    model_config = ConfigDict(extra="forbid")

    family: Literal["lattice", "radial", "patched", "halfspace", "onedim"] = "lattice"
    dim: int = Field(default=2, ge=1, le=4, description="次元")
    radius: float = Field(default=50.0, gt=0, description="窓の半径")
    scale: float = Field(default=1.0, gt=0)
    phi: PhiSpec = PhiSpec(expression="sqrt")
    ratio: float = Field(default=DEFAULT_RATIO, gt=1)
    schedule_n: int = Field(default=DEFAULT_SCHEDULE_LENGTH, ge=1)
    extend_tail: bool = False
    reference_scale: float = Field(default=1.0, gt=0, description="Z の格子の間隔")
    sides: list[int] = Field(default_factory=lambda: [2, 3, 4, 5], min_length=1)
    psi: PhiSpec = PhiSpec(expression="power:1,25")
    density: DensitySpec = Field(default_factory=DensitySpec)
    c: float = Field(default=1.5, gt=1, lt=2)
    zeta: PhiSpec = PhiSpec(expression="linear")
    n_max: int = Field(default=8, ge=2)

    @field_validator("sides")
    @classmethod
    def validate_sides(cls, v: list[int]) -> list[int]:
        """l_1 ≥ 2 かつ狭義単調増加であることを検証します。"""
        if v[0] < 2 or any(b <= a for a, b in zip(v, v[1:], strict=False)):  # noqa: PLR2004
            msg = f"辺の長さは 2 以上の狭義単調増加列である必要があります: {v}"
            raise ValueError(msg)
        return v

    @model_validator(mode="after")
    def validate_family(self) -> "NetSpec":
        """族ごとの次元の制約を検証します。"""
        if self.family == "onedim" and self.dim != 1:
            msg = f"onedim は 1 次元のみです(dim={self.dim})"
            raise ValueError(msg)
        if self.family == "halfspace" and self.dim < 2:  # noqa: PLR2004
            msg = f"halfspace は 2 次元以上が必要です(dim={self.dim})"
            raise ValueError(msg)
        return self


class ExperimentConfig(BaseModel):
    """1回のコマンド実行の設定。

    同じ設定とシードで再実行すると、CSV 出力はバイト単位で一致します。

    Attributes:
        command: generate / displacement / verify / density
        net: ネットの指定
        out: 出力ディレクトリ
        seed: 乱択テストのシード
        suite: verify のスイート名(default / oracle / faults / 番号のカンマ区切り)
        radii: 共有の半径グリッド(省略時は窓から自動生成)
        grid_points: 自動生成するグリッドの点数
        plots: 静的プロット (HTML) を出力するか
    """

    model_config = ConfigDict(extra="forbid")

    command: Literal["generate", "displacement", "verify", "density"] = "generate"
    net: NetSpec = Field(default_factory=NetSpec)
    out: Path = Path("artifacts")
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    suite: str = "default"
    radii: list[float] | None = None
    grid_points: int = Field(default=DEFAULT_GRID_POINTS, ge=2)
    plots: bool = True

    @field_validator("suite")
    @classmethod
    def validate_suite(cls, v: str) -> str:
        """スイート名または基準番号のカンマ区切りであることを検証します。"""
        if v in SUITE_NAMES:
            return v
        parts = [p.strip() for p in v.split(",")]
        if not all(p.isdigit() and int(p) in CRITERION_IDS for p in parts):
            msg = f"スイートは {SUITE_NAMES} か 1..10 のカンマ区切りである必要があります: '{v}'"
            raise ValueError(msg)
        return v

    @field_validator("radii")
    @classmethod
    def validate_radii(cls, v: list[float] | None) -> list[float] | None:
        if v is not None and (not v or any(r <= 0 for r in v)):
            msg = "半径グリッドは正の値を1個以上含む必要があります"
            raise ValueError(msg)
        return None if v is None else sorted(set(v))

    @property
    def criterion_ids(self) -> list[int]:
        """実行する受け入れ基準の番号(faults では空)。"""
        if self.suite == "default":
            return list(CRITERION_IDS)
        if self.suite == "oracle":
            return [3]
        if self.suite == "faults":
            return []
        return sorted({int(p) for p in self.suite.split(",")})

    @classmethod
    def load(cls, path: Path | None, overrides: dict[str, Any]) -> "ExperimentConfig":
        """JSON 設定ファイルを読み、フラグの値で上書きします。

        Args:
            path: 設定ファイル(None なら既定値から)
            overrides: フラグの値。"net." で始まるキーは net の項目を上書きします

        Raises:
            pydantic.ValidationError: 検証に失敗した場合
            FileNotFoundError: 設定ファイルが存在しない場合
        """
        data: dict[str, Any] = {}
        if path is not None:
            data = json.loads(path.read_text(encoding="utf-8"))
        net = dict(data.get("net", {}))
        for key, value in overrides.items():
            if value is None:
                continue
            if key.startswith("net."):
                net[key.removeprefix("net.")] = value
            else:
                data[key] = value
        data["net"] = net
        return cls.model_validate(data)

    def to_json(self) -> str:
        """キーを整列した JSON 文字列を返します。"""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"
