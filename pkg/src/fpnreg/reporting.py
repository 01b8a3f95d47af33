"""Deterministic report serialization.

Structured output is canonical JSON: keys sorted, floats at 12 significant
digits, two-space indentation.  Row output is a CSV-style table with one
header line.  Equal inputs produce byte-identical bytes, which golden-file
and determinism tests rely on.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .fourier import Spectrum, spectrum_to_dict
from .threeap import Flower, flower_to_dict
from .vectorspace import DenseSubset, SpaceDescriptor, SubspaceBasis, basis_to_dict, subset_to_dict


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"reports must not contain non-finite floats, got {x}")
    s = format(float(x), ".12g")
    if "." not in s and "e" not in s and "E" not in s and "inf" not in s:
        s += ".0"
    return s


def to_jsonable(obj):
    """Recursively convert report objects to plain JSON-ready structures."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, DenseSubset):
        return subset_to_dict(obj)
    if isinstance(obj, SubspaceBasis):
        return basis_to_dict(obj)
    if isinstance(obj, Spectrum):
        return spectrum_to_dict(obj)
    if isinstance(obj, Flower):
        return flower_to_dict(obj)
    if isinstance(obj, SpaceDescriptor):
        return {"p": obj.p, "n": obj.n}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def _write(obj, out: list, indent: int):
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, k in enumerate(keys):
            out.append(pad + "  " + json.dumps(str(k)) + ": ")
            _write(obj[k], out, indent + 1)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _write(v, out, indent + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Canonical structured-text form: sorted keys, 12-significant-digit floats."""
    out: list = []
    _write(to_jsonable(obj), out, 0)
    out.append("\n")
    return "".join(out)


def render_rows(header, rows) -> str:
    """Header line plus one comma-separated row per record."""
    def cell(x):
        if isinstance(x, bool) or isinstance(x, np.bool_):
            return "1" if x else "0"
        if isinstance(x, (float, np.floating)):
            return format_float(float(x))
        if isinstance(x, (int, np.integer)):
            return str(int(x))
        return str(x)

    lines = [",".join(str(h) for h in header)]
    lines.extend(",".join(cell(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"
