"""Reading and writing channel and matrix files.

Both are single-line JSON documents. Complex numbers are ``[re, im]`` pairs
and matrices are row-major nested lists. Floats are written with 17
significant digits so every double survives a round trip.

Channel file::

    {"schema_version": 1, "n": 2, "kraus": [[[[1, 0], [0, 0]], ...], ...],
     "name": "pinching", "seed": null}
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .channel import CPMap

SCHEMA_VERSION = 1


class ChannelFileError(ValueError):
    """Malformed channel or matrix file."""


def dumps(obj: Any) -> str:
    """Compact JSON with floats printed to 17 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialize non-finite float {x}")
        text = format(x, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, np.integer):
        return str(int(obj))
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def encode_matrix(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a)]


def _reject_constant(token: str):
    raise ChannelFileError(f"non-finite number {token!r} in file")


def _loads(text: str) -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ChannelFileError(f"invalid JSON: {exc}") from exc


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def decode_matrix(data, rows: int, cols: int, what: str = "matrix") -> np.ndarray:
    if not isinstance(data, list) or len(data) != rows:
        raise ChannelFileError(f"{what}: expected {rows} rows")
    out = np.zeros((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise ChannelFileError(f"{what}: row {i} does not have {cols} entries")
        for j, z in enumerate(row):
            if not (isinstance(z, list) and len(z) == 2 and all(map(_is_number, z))):
                raise ChannelFileError(f"{what}[{i}][{j}]: expected an [re, im] pair")
            if not all(math.isfinite(float(x)) for x in z):
                raise ChannelFileError(f"{what}[{i}][{j}]: non-finite value")
            out[i, j] = complex(float(z[0]), float(z[1]))
    return out


def channel_to_text(
    p: CPMap, name: Optional[str] = None, seed: Optional[int] = None
) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": p.n,
        "kraus": [encode_matrix(t) for t in p.kraus],
        "name": name,
        "seed": seed,
    }
    return dumps(doc) + "\n"


def channel_from_text(text: str) -> CPMap:
    doc = _loads(text)
    if not isinstance(doc, dict):
        raise ChannelFileError("channel file must hold a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ChannelFileError(f"unsupported schema_version {doc.get('schema_version')!r}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ChannelFileError(f"n must be a positive integer, got {n!r}")
    kraus = doc.get("kraus")
    if not isinstance(kraus, list):
        raise ChannelFileError("kraus must be a list of matrices")
    ops = tuple(decode_matrix(t, n, n, f"kraus[{r}]") for r, t in enumerate(kraus))
    return CPMap(n, ops)


def write_channel(path, p: CPMap, name: Optional[str] = None, seed: Optional[int] = None):
    Path(path).write_text(channel_to_text(p, name=name, seed=seed))


def read_channel(path) -> CPMap:
    return channel_from_text(Path(path).read_text())


def matrix_to_text(a: np.ndarray) -> str:
    a = np.asarray(a)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "rows": a.shape[0],
        "cols": a.shape[1],
        "data": encode_matrix(a),
    }
    return dumps(doc) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    doc = _loads(text)
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise ChannelFileError("not a matrix file")
    rows, cols = doc.get("rows"), doc.get("cols")
    if not all(isinstance(x, int) and x >= 0 for x in (rows, cols)):
        raise ChannelFileError("rows and cols must be non-negative integers")
    return decode_matrix(doc.get("data"), rows, cols)
