"""CSV and JSON round-tripping for curves, sample batches and kernel matrices.

CSV layout: a ``# {json}`` line with the metadata, a header line, then rows.
Reals are written with 17 significant digits, which round-trips IEEE doubles
exactly.  JSON layout: ``{"meta": ..., "data": ...}``.
"""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path
from typing import Union

import numpy as np

from .fredholm import CdfCurve
from .kernels import KernelMatrix
from .montecarlo import SampleBatch

__all__ = ["OUTPUT_DIR_ENV", "resolve_output", "dumps", "loads", "write", "read"]

OUTPUT_DIR_ENV = "NIBB_MAX_OUTPUT_DIR"

Serializable = Union[CdfCurve, SampleBatch, KernelMatrix]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def resolve_output(path: str | os.PathLike | None) -> Path | None:
    """Relative paths are placed under ``$NIBB_MAX_OUTPUT_DIR`` when it is set."""
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _describe(obj: Serializable) -> tuple[dict, list[str], list[list[float]]]:
    if isinstance(obj, CdfCurve):
        meta = {"kind": "cdf", **obj.meta}
        return meta, ["x", "cdf"], [[g, v] for g, v in zip(obj.grid, obj.values)]
    if isinstance(obj, SampleBatch):
        meta = {"kind": "samples", "model": obj.model, "seed": int(obj.seed), "n": int(obj.n)}
        return meta, ["value"], [[v] for v in obj.values]
    if isinstance(obj, KernelMatrix):
        meta = {
            "kind": "matrix",
            "label": obj.label,
            "row_range": list(obj.row_range),
            "col_range": list(obj.col_range),
        }
        c0, c1 = obj.col_range
        return meta, [f"c{k}" for k in range(c0, c1 + 1)], obj.entries.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _build(meta: dict, rows: list[list[float]]) -> Serializable:
    meta = dict(meta)
    kind = meta.pop("kind")
    arr = np.array(rows, dtype=float)
    if kind == "cdf":
        arr = arr.reshape(-1, 2)
        return CdfCurve(arr[:, 0], arr[:, 1], meta)
    if kind == "samples":
        return SampleBatch(arr.reshape(-1), meta["model"], meta["seed"], meta["n"])
    if kind == "matrix":
        r0, r1 = meta["row_range"]
        c0, c1 = meta["col_range"]
        arr = arr.reshape(r1 - r0 + 1, c1 - c0 + 1)
        return KernelMatrix(meta["label"], (r0, r1), (c0, c1), arr)
    raise ValueError(f"unknown kind {kind!r}")


def dumps(obj: Serializable, fmt: str = "csv") -> str:
    meta, header, rows = _describe(obj)
    if fmt == "json":
        data = {name: [float(r[i]) for r in rows] for i, name in enumerate(header)}
        if meta["kind"] == "matrix":
            data = [[float(v) for v in r] for r in rows]
        return json.dumps({"meta": meta, "data": data}, indent=1)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def loads(text: str, fmt: str = "csv") -> Serializable:
    if fmt == "json":
        doc = json.loads(text)
        meta, data = doc["meta"], doc["data"]
        if meta["kind"] == "matrix":
            return _build(meta, data)
        cols = list(data.values())
        return _build(meta, [list(r) for r in zip(*cols)])
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing metadata line")
    meta = json.loads(lines[0][2:])
    reader = csv.reader(lines[2:])
    return _build(meta, [[float(v) for v in row] for row in reader if row])


def write(obj: Serializable, path: str | os.PathLike, fmt: str | None = None) -> Path:
    p = resolve_output(path)
    fmt = fmt or ("json" if p.suffix == ".json" else "csv")
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(obj, fmt))
    return p


def read(path: str | os.PathLike, fmt: str | None = None) -> Serializable:
    p = Path(path)
    fmt = fmt or ("json" if p.suffix == ".json" else "csv")
    return loads(p.read_text(), fmt)
