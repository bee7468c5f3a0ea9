"""CSV / JSON 成果物の書き出しと読み込み。

すべての書き出しは同じディレクトリの一時ファイルに書いてから置き換えるため、
途中で中断しても壊れたファイルは残りません。浮動小数点数は repr で書くので、
読み込むと元の値にビット単位で戻ります。
"""

import csv
import io
import json
import logging
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from src.domain.models import (
    CurveKind,
    DisplacementCurve,
    ExplicitMap,
    Matching,
    NetCertificate,
    NetWindow,
)
from src.domain.patched_net import CubeLayout
from src.domain.schedule import RadiusSchedule

logger = logging.getLogger(__name__)

CURVE_HEADER = ("R", "value", "kind", "label", "truncated", "params")
SCHEDULE_HEADER = ("i", "R_i", "phi_R_i")


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float | np.floating):
        return repr(float(value))
    return str(value)


def atomic_write_text(path: Path, text: str) -> Path:
    """テキストを一時ファイル経由で書き出します。"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", newline="", dir=path.parent, prefix=f".{path.name}.", delete=False
    ) as handle:
        handle.write(text)
        temporary = Path(handle.name)
    temporary.replace(path)
    logger.debug("書き出しました: %s", path)
    return path


def write_json(path: Path, payload: Any) -> Path:
    text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
    return atomic_write_text(path, text + "\n")


def write_rows(
    path: Path, header: tuple[str, ...] | list[str], rows: list[tuple] | list[list]
) -> Path:
    """ヘッダ付きの CSV を書き出します。"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return atomic_write_text(path, buffer.getvalue())


def read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    """CSV を (ヘッダ, 行) として読み込みます。"""
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        return header, [row for row in reader]


# ============================================================================
# 窓
# ============================================================================


def certificate_to_dict(certificate: NetCertificate) -> dict[str, float | int]:
    return {
        "separation": certificate.separation,
        "net_constant": certificate.net_constant,
        "layer_gap": certificate.layer_gap,
        "boundary_margin": certificate.boundary_margin,
        "probe_radius": certificate.probe_radius,
        "probe_count": certificate.probe_count,
    }


def write_window(path: Path, window: NetWindow, certificate: NetCertificate | None = None) -> Path:
    """窓を JSON(点は辞書式順)で書き出します。"""
    payload: dict[str, Any] = {
        "label": window.label,
        "dim": window.dim,
        "window_radius": window.window_radius,
        "count": len(window),
        "points": window.points.tolist(),
    }
    if certificate is not None:
        payload["certificate"] = certificate_to_dict(certificate)
    return write_json(path, payload)


def load_window(path: Path) -> NetWindow:
    data = json.loads(path.read_text(encoding="utf-8"))
    points = np.asarray(data["points"], dtype=np.float64).reshape(-1, int(data["dim"]))
    return NetWindow(
        dim=int(data["dim"]),
        points=points,
        window_radius=float(data["window_radius"]),
        label=str(data["label"]),
    )


# ============================================================================
# 曲線
# ============================================================================


def _params_text(params: tuple[tuple[str, float], ...]) -> str:
    return ";".join(f"{name}={float(value)!r}" for name, value in params)


def _params_parse(text: str) -> tuple[tuple[str, float], ...]:
    if not text:
        return ()
    pairs = [item.partition("=") for item in text.split(";")]
    return tuple((name, float(value)) for name, _, value in pairs)


def write_curves(path: Path, curves: list[DisplacementCurve]) -> Path:
    """曲線を R,value,kind,label,truncated,params の長い形式で書き出します。"""
    rows = [
        (radius, value, str(curve.kind), curve.label, curve.truncated, _params_text(curve.params))
        for curve in curves
        for radius, value in curve.rows()
    ]
    return write_rows(path, CURVE_HEADER, rows)


def load_curves(path: Path) -> list[DisplacementCurve]:
    """write_curves の出力を曲線の一覧に戻します(出現順)。

    空の曲線は行を持たないため復元されません。
    """
    header, rows = read_rows(path)
    if tuple(header) != CURVE_HEADER:
        msg = f"曲線 CSV のヘッダが不正です: {header}"
        raise ValueError(msg)
    grouped: dict[tuple[str, str], list[list[str]]] = {}
    for row in rows:
        grouped.setdefault((row[2], row[3]), []).append(row)
    return [
        DisplacementCurve(
            radii=tuple(float(r[0]) for r in group),
            values=tuple(float(r[1]) for r in group),
            kind=CurveKind(kind),
            label=label,
            truncated=group[0][4] == "true",
            params=_params_parse(group[0][5]),
        )
        for (kind, label), group in grouped.items()
    ]


# ============================================================================
# 写像・マッチング・スケジュール・配置
# ============================================================================


def _coordinate_header(prefix: str, dim: int) -> list[str]:
    return [f"{prefix}{axis}" for axis in range(dim)]


def write_map(path: Path, mapping: ExplicitMap) -> Path:
    """写像を x0..,fx0..,disp の CSV で書き出します(始点の辞書式順)。"""
    header = [*_coordinate_header("x", mapping.dim), *_coordinate_header("fx", mapping.dim), "disp"]
    rows = [
        [*source, *target, disp]
        for source, target, disp in zip(
            mapping.sources.tolist(),
            mapping.targets.tolist(),
            mapping.displacements.tolist(),
            strict=True,
        )
    ]
    return write_rows(path, header, rows)


def load_map(path: Path, domain_radius: float, label: str = "") -> ExplicitMap:
    header, rows = read_rows(path)
    dim = (len(header) - 1) // 2
    values = np.asarray(rows, dtype=np.float64).reshape(-1, len(header))
    return ExplicitMap(values[:, :dim], values[:, dim : 2 * dim], domain_radius, label)


def write_matching(path: Path, matching: Matching) -> Path:
    """マッチングを s0..,t0..,dist の CSV で書き出します。"""
    dim = matching.sources.shape[1]
    header = [*_coordinate_header("s", dim), *_coordinate_header("t", dim), "dist"]
    rows = [
        [*source, *target, dist]
        for source, target, dist in zip(
            matching.sources.tolist(),
            matching.targets.tolist(),
            matching.distances.tolist(),
            strict=True,
        )
    ]
    return write_rows(path, header, rows)


def load_matching(path: Path) -> Matching:
    header, rows = read_rows(path)
    dim = (len(header) - 1) // 2
    values = np.asarray(rows, dtype=np.float64).reshape(-1, len(header))
    return Matching(values[:, :dim], values[:, dim : 2 * dim])


def write_schedule(path: Path, schedule: RadiusSchedule) -> Path:
    return write_rows(path, SCHEDULE_HEADER, schedule.rows())


def layout_to_dict(layout: CubeLayout) -> dict[str, Any]:
    """立方体の配置を JSON 化できる辞書にします(有理数の目標値は文字列)。"""
    return {
        "sides": list(layout.sides),
        "psi": list(layout.psi_values),
        "cubes": [
            {
                "k": k,
                "region": {"corner": list(region.corner), "side": region.side},
                "patch": {"corner": list(patch.corner), "side": patch.side},
                "cells_per_axis": placement.cells_per_axis,
                "cell_counts": list(placement.cell_counts),
                "cell_targets": [str(t) for t in placement.cell_targets],
            }
            for k, (region, patch, placement) in enumerate(
                zip(layout.regions, layout.patches, layout.placements, strict=True), start=1
            )
        ],
    }
