"""JSON matrix files and CSV helpers.

Format: ``{"n": int, "re": [[...]], "im": [[...]]}``. Numbers are written
with 17 significant digits so that load(save(A)) is bit-exact.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .linalg import hermitian


class MalformedMatrix(ValueError):
    pass


def _fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("matrix entries must be finite")
    s = format(x, ".17g")
    if s.lstrip("-").isdigit():
        return s + ".0"
    return s


def _rows(M: np.ndarray) -> str:
    return "[" + ", ".join("[" + ", ".join(_fmt(x) for x in row) + "]" for row in M) + "]"


def dumps_matrix(A) -> str:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return f'{{"n": {A.shape[0]}, "re": {_rows(A.real)}, "im": {_rows(A.imag)}}}'


def matrix_from_obj(obj, symmetrize: bool = True) -> np.ndarray:
    try:
        n = obj["n"]
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedMatrix(f"not a matrix object: {exc}") from exc
    if not isinstance(n, int) or n < 1:
        raise MalformedMatrix(f"bad dimension {n!r}")
    if re.shape != (n, n) or im.shape != (n, n):
        raise MalformedMatrix(f"entries do not form a {n}x{n} matrix")
    A = re + 1j * im
    return hermitian(A) if symmetrize else A


def loads_matrix(text: str, symmetrize: bool = True) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedMatrix(str(exc)) from exc
    return matrix_from_obj(obj, symmetrize)


def load_matrix(path, symmetrize: bool = True) -> np.ndarray:
    """Read a matrix file. Hermitian symmetrization is applied unless
    ``symmetrize=False`` (general invertible inputs such as a factorized ``g``).
    """
    return loads_matrix(Path(path).read_text(), symmetrize)


def save_matrix(path, A) -> None:
    Path(path).write_text(dumps_matrix(A) + "\n")


def matrix_obj(A) -> dict:
    """Matrix as a JSON-ready dict (embedded in larger documents)."""
    return json.loads(dumps_matrix(A))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _token(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return _fmt(x)
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_token(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_token(v) for v in x) + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps_json(obj) -> str:
    """One-line JSON with every float written at 17 significant digits."""
    return _token(obj)
