"""JSON/CSV encoding of reports plus the run manifest embedded in each one.

Floats carry 6 significant digits; infinities become the string ``"inf"``
(``"-inf"``) and undefined values become ``null``.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__

SCHEMA_ID = "regimescope.report/1"
SIG_DIGITS = 6


def fmt_float(x: float) -> float | str | None:
    if x is None or math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIG_DIGITS}g}")


def jsonable(obj):
    """Recursively convert reports, numpy values and dates into JSON types."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.datetime64):
        return str(obj.astype("datetime64[D]"))
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()] if obj.dtype.kind != "M" else [str(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {_key(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _key(k) -> str:
    if isinstance(k, (float, np.floating)):
        return f"{float(k):.{SIG_DIGITS}g}"
    return str(k)


def csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        v = fmt_float(float(value))
        return "" if v is None else (v if isinstance(v, str) else f"{v:.{SIG_DIGITS}g}")
    return str(value)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([csv_cell(v) for v in row])
    return buf.getvalue()


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict
    input_digest: str
    artifact_version: str = __version__


def envelope(kind: str, manifest: RunManifest, data) -> dict:
    return {
        "schema": SCHEMA_ID,
        "kind": kind,
        "manifest": jsonable(manifest),
        "data": jsonable(data),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=1, allow_nan=False) + "\n"


def load_schema() -> dict:
    """The JSON schema every report file conforms to."""
    text = resources.files(__package__).joinpath("schema/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
