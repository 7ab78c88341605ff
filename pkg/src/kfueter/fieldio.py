"""Reading and writing sampled fields.

JSON layout::

    {"grid": {"type": "torus", "n": 8, "period": 6.28...},
     "m": 4,
     "data": [[re, im], ...]}

with ``data`` the values flattened in C order over ``(i0, i1, i2, i3, component)``.
Box fields use ``{"type": "box", "n": N, "h": h, "level": 0|1|2}``.

The binary layout is the magic ``FHFLD1``, then little-endian ``n`` and ``m``
as int64 and ``period`` (``h`` for box grids) as float64, then the float64
``(re, im)`` pairs.  Box fields insert two bytes after the header: ``b"B"``
and the level.
"""
import json
import struct
from pathlib import Path

import numpy as np

from .errors import ShapeError
from .grids import BoxGrid, Field, TorusGrid

MAGIC = b"FHFLD1"
_HEADER = struct.Struct("<6sqqd")


def grid_from_json(data):
    kind = data.get("type", "torus")
    if kind == "torus":
        return TorusGrid(int(data["n"]), float(data.get("period", 2 * np.pi)))
    if kind == "box":
        return BoxGrid(int(data["n"]), float(data.get("h", 1.0)))
    raise ValueError(f"unknown grid type {kind!r}")


def field_to_json(f):
    grid = f.grid.to_json()
    if f.grid.kind == "box":
        grid["level"] = f.level
    flat = f.values.ravel()
    return {
        "grid": grid,
        "m": f.m,
        "data": np.column_stack([flat.real, flat.imag]).tolist(),
    }


def field_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    grid = grid_from_json(data["grid"])
    level = int(data["grid"].get("level", 0))
    m = int(data["m"])
    pairs = np.asarray(data["data"], dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ShapeError("data must be a list of [re, im] pairs")
    shape = _shape(grid, level) + (m,)
    if pairs.shape[0] != int(np.prod(shape)):
        raise ShapeError(f"expected {int(np.prod(shape))} values, got {pairs.shape[0]}")
    values = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape)
    return Field(grid, values, level)


def field_to_bytes(f):
    g = f.grid
    scale = g.period if g.kind == "torus" else g.h
    out = [_HEADER.pack(MAGIC, g.n, f.m, scale)]
    if g.kind == "box":
        out.append(bytes([ord("B"), f.level]))
    flat = f.values.ravel()
    pairs = np.column_stack([flat.real, flat.imag]).astype("<f8")
    out.append(pairs.tobytes())
    return b"".join(out)


def field_from_bytes(buf):
    if len(buf) < _HEADER.size or buf[:6] != MAGIC:
        raise ValueError("not a field file (bad magic)")
    _, n, m, scale = _HEADER.unpack_from(buf)
    rest = buf[_HEADER.size:]
    # payload is a whole number of 16-byte pairs; box files carry 2 extra bytes
    if len(rest) % 16 == 2 and rest[:1] == b"B":
        grid, level, rest = BoxGrid(n, scale), rest[1], rest[2:]
    else:
        grid, level = TorusGrid(n, scale), 0
    shape = _shape(grid, level) + (m,)
    pairs = np.frombuffer(rest, dtype="<f8")
    if pairs.size != 2 * int(np.prod(shape)):
        raise ShapeError(f"payload holds {pairs.size // 2} values, expected {int(np.prod(shape))}")
    pairs = pairs.reshape(-1, 2)
    return Field(grid, (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape), level)


def _shape(grid, level):
    return grid.shape if grid.kind == "torus" else grid.level_shape(level)


def write_field(f, path):
    """Write JSON for ``*.json`` paths, binary otherwise."""
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(field_to_json(f)))
    else:
        path.write_bytes(field_to_bytes(f))


def read_field(path):
    path = Path(path)
    raw = path.read_bytes()
    if raw[:6] == MAGIC:
        return field_from_bytes(raw)
    return field_from_json(json.loads(raw))
