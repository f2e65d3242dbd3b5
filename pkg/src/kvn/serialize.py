"""JSON encoding of complex arrays and canonical output.

Complex scalars are written as ``[re, im]``; plain numbers are accepted on
input.  Matrices are lists of rows.  Output uses sorted keys and floats with
17 significant digits so equal inputs give byte-identical files.
"""

import json
import math

import numpy as np

from .bounds import Interval
from .errors import InvalidInput


def _scalar(obj):
    if isinstance(obj, bool):
        raise InvalidInput(f"expected a number, got {obj!r}")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj
    ):
        return complex(obj[0], obj[1])
    raise InvalidInput(f"expected a number or [re, im], got {obj!r}")


def decode_complex(obj, ndim):
    """Parse nested lists into a complex array with ``ndim`` axes."""
    if ndim == 0:
        return _scalar(obj)
    if not isinstance(obj, (list, tuple)):
        raise InvalidInput(f"expected a list for a {ndim}-dimensional array, got {obj!r}")
    parts = [decode_complex(o, ndim - 1) for o in obj]
    if ndim == 1:
        return np.array(parts, dtype=complex)
    if not parts:
        return np.zeros((0,) * ndim, complex)
    shapes = {p.shape for p in parts}
    if len(shapes) != 1:
        raise InvalidInput(f"ragged array: row shapes {sorted(shapes)}")
    return np.stack(parts).astype(complex)


def decode_matrix(obj):
    """Matrix from a list of rows (``[[], []]`` is a 2x0 matrix)."""
    M = decode_complex(obj, 2)
    if M.ndim != 2:
        raise InvalidInput("expected a list of rows")
    return M


def encode_complex(a):
    """Nested lists with every scalar written as ``[re, im]``."""
    a = np.asarray(a)
    if a.ndim == 0:
        z = complex(a)
        return [z.real, z.imag]
    return [encode_complex(v) for v in a]


def encode_real(a):
    return np.asarray(a, dtype=float).tolist()


def to_jsonable(obj):
    if isinstance(obj, Interval):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_complex(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def _fmt_float(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1)) if indent else ""
    close = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = ": " if indent else ":"
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + nl)
        keys = sorted(obj)
        for n, k in enumerate(keys):
            out.append(pad + json.dumps(k) + sep)
            _emit(obj[k], indent, level + 1, out)
            out.append(("," if n < len(keys) - 1 else "") + nl)
        out.append(close + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        flat = all(not isinstance(v, (dict, list)) for v in obj) or all(
            isinstance(v, list) and all(not isinstance(u, (dict, list)) for u in v) for v in obj
        )
        if flat or not indent:
            out.append("[" + ", ".join(_compact(v) for v in obj) + "]")
            return
        out.append("[" + nl)
        for n, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(("," if n < len(obj) - 1 else "") + nl)
        out.append(close + "]")
    else:
        out.append(_compact(obj))


def _compact(obj):
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        return "[" + ", ".join(_compact(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(json.dumps(k) + ": " + _compact(obj[k]) for k in sorted(obj)) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Canonical JSON text: sorted keys, ``.17g`` floats, trailing newline."""
    out = []
    _emit(to_jsonable(obj), indent, 0, out)
    return "".join(out) + "\n"
