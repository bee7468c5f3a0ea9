"""コマンドライン引数の定義と、設定への変換。

フラグの既定値はすべて None で、指定されたフラグだけが設定ファイルの値を
上書きします。値の検証は ExperimentConfig (pydantic) に任せます。
"""

import argparse
from pathlib import Path
from typing import Any

from cli.config.constants import (
    COMMANDS,
    DEFAULT_LOG_LEVEL,
    LOG_LEVELS,
    NET_FLAGS,
    PROG,
    TOP_LEVEL_FLAGS,
)


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        msg = f"カンマ区切りの数値ではありません: '{text}'"
        raise argparse.ArgumentTypeError(msg) from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        msg = f"カンマ区切りの整数ではありません: '{text}'"
        raise argparse.ArgumentTypeError(msg) from exc


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON 設定ファイル(フラグが優先)")
    common.add_argument(
        "--net",
        choices=("lattice", "radial", "patched", "halfspace", "onedim"),
        help="ネットの族",
    )
    common.add_argument("--dim", type=int, help="次元")
    common.add_argument("--radius", type=float, help="窓の半径 R_max")
    common.add_argument("--scale", type=float, help="格子の間隔 (lattice)")
    common.add_argument("--phi", help="尺度 φ (sqrt, log, power:β[,a], ...)")
    common.add_argument("--ratio", type=float, help="スケジュールの比 K")
    common.add_argument("--schedule-n", type=int, help="スケジュールの長さ")
    common.add_argument(
        "--extend-tail",
        action="store_const",
        const=True,
        help="γ を最後の折れ点の外側へ傾き 1 で延長する",
    )
    common.add_argument(
        "--reference-scale", type=float, help="比較対象 Z = s·ℤ^d の間隔 s (radial)"
    )
    common.add_argument("--sides", type=_int_list, help="立方体の辺 l_k (patched)")
    common.add_argument("--psi", help="領域間の距離 ψ (patched)")
    common.add_argument("--c", type=float, help="半空間の密度 c (halfspace)")
    common.add_argument("--zeta", help="増大の尺度 ζ (onedim)")
    common.add_argument("--n-max", type=int, help="ψ の項数 (onedim)")
    common.add_argument("--radii", type=_float_list, help="共有の半径グリッド")
    common.add_argument("--grid-points", type=int, help="自動グリッドの点数")
    common.add_argument("--out", type=Path, help="出力ディレクトリ")
    common.add_argument("--seed", type=int, help="乱択テストのシード")
    common.add_argument("--log-level", choices=LOG_LEVELS, default=DEFAULT_LOG_LEVEL)
    common.add_argument("--no-plots", action="store_true", help="HTML プロットを出力しない")
    return common


def build_parser() -> argparse.ArgumentParser:
    """サブコマンド付きのパーサを組み立てます。

    Examples:
        >>> args = build_parser().parse_args(["generate", "--net", "lattice", "--radius", "2"])
        >>> args.command, args.net, args.radius
        ('generate', 'lattice', 2.0)
    """
    parser = argparse.ArgumentParser(
        prog=PROG, description="分離ネットの構成と変位の上下界の有限窓での検証"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()
    helps = {
        "generate": "ネットを生成し、証明書と検査結果を書き出す",
        "displacement": "変位曲線と上下界を書き出す",
        "verify": "受け入れ基準のスイートを実行する",
        "density": "自然密度と不一致度を書き出す",
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(command, parents=[common], help=helps[command])
        if command == "verify":
            sub.add_argument("--suite", help="default / oracle / faults / 番号のカンマ区切り")
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    """指定されたフラグを ExperimentConfig.load の上書き辞書に変換します。"""
    overrides: dict[str, Any] = {"command": args.command}
    for flag, key in NET_FLAGS.items():
        overrides[key] = getattr(args, flag, None)
    for flag in TOP_LEVEL_FLAGS:
        overrides[flag] = getattr(args, flag, None)
    if args.no_plots:
        overrides["plots"] = False
    return overrides
