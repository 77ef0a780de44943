"""Lossless text output: CSV density tables and JSON documents.

Floats are written with 17 significant digits so every binary64 value
round-trips exactly. Line endings are always LF.
"""
import json
import math

import numpy as np


def fmt(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"refusing to write non-finite value {x!r}")
    return format(x, ".17g")


def write_csv(stream, xi, values, comments=()):
    """Write ``#`` comment lines, the header ``xi,value`` and one row per point."""
    xi = np.asarray(xi, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    if xi.shape != values.shape:
        raise ValueError("xi and values must have the same length")
    lines = [f"# {c}" for c in comments]
    lines.append("xi,value")
    lines.extend(f"{fmt(a)},{fmt(b)}" for a, b in zip(xi, values))
    stream.write("\n".join(lines) + "\n")


def read_csv(stream):
    """Inverse of ``write_csv``: returns (comments, xi, values)."""
    comments, rows = [], []
    header_seen = False
    for line in stream.read().split("\n"):
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif not header_seen:
            if line.strip() != "xi,value":
                raise ValueError(f"unexpected header {line!r}")
            header_seen = True
        else:
            a, b = line.split(",")
            rows.append((float(a), float(b)))
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return comments, arr[:, 0], arr[:, 1]


def _encode(obj):
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{fmt(obj.real)}, {fmt(obj.imag)}]"
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj):
    """JSON text with 17-digit floats; arrays row-major, complex as [re, im]."""
    return _encode(obj) + "\n"


def complex_matrix(rows):
    """Rebuild a complex array from nested [re, im] pairs."""
    arr = np.asarray(rows, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]
