"""Versioned JSON system files.

Layout (schema version 1)::

    {
      "schema_version": 1,
      "kind": "plain" | "partitioned" | "special_class",
      "dims": {"n": 2, "m": 1}              # plain
              {"n1": 1, "n2": 1, "m": 1}    # partitioned, special_class
      "matrices": {"F": [[[re, im], ...], ...], ...},
      "realization": {...}                  # optional, plain only: Theta, S, Lambda, M
    }

Each complex entry is a ``[real, imaginary]`` pair.  Floats are written with
``repr`` precision so a write/read cycle is bit-exact.
"""
import json
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adiabatic import SpecialClassParams
from .errors import FileFormatError, QSysError
from .qsys import PhysicalRealization, QuantumLinearSystem
from .singular import PartitionedSystem

SCHEMA_VERSION = 1

_MATRIX_NAMES = {
    "plain": ("F", "G", "H", "K"),
    "partitioned": ("F11", "F12", "F21", "F22", "G1", "G2", "H1", "H2", "K"),
    "special_class": ("Lambda1", "Lambda2", "M11", "M12", "M22", "S"),
}
_DIM_NAMES = {"plain": ("n", "m"), "partitioned": ("n1", "n2", "m"), "special_class": ("n1", "n2", "m")}
_REALIZATION_NAMES = ("Theta", "S", "Lambda", "M")


def _shapes(kind, d):
    if kind == "plain":
        n, m = d["n"], d["m"]
        return {"F": (n, n), "G": (n, m), "H": (m, n), "K": (m, m)}
    n1, n2, m = d["n1"], d["n2"], d["m"]
    if kind == "partitioned":
        return {
            "F11": (n1, n1), "F12": (n1, n2), "F21": (n2, n1), "F22": (n2, n2),
            "G1": (n1, m), "G2": (n2, m), "H1": (m, n1), "H2": (m, n2), "K": (m, m),
        }
    return {
        "Lambda1": (m, n1), "Lambda2": (m, n2), "M11": (n1, n1),
        "M12": (n1, n2), "M22": (n2, n2), "S": (m, m),
    }


@dataclass
class SystemFile:
    kind: str
    system: object
    realization: Optional[PhysicalRealization] = None


def encode_matrix(a):
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(data, shape, name):
    rows, cols = shape
    if not isinstance(data, list) or (rows > 0 and len(data) != rows):
        raise FileFormatError(f"matrix {name}: expected {rows} rows")
    if rows == 0:
        if data not in ([],):
            raise FileFormatError(f"matrix {name}: expected no rows")
        return np.zeros((0, cols), dtype=complex)
    out = np.empty((rows, cols), dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise FileFormatError(f"matrix {name}: row {i} must have {cols} entries")
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)):
                raise FileFormatError(f"matrix {name}[{i}][{j}] must be a [real, imaginary] pair of numbers")
            out[i, j] = complex(entry[0], entry[1])
    if not np.all(np.isfinite(out)):
        raise FileFormatError(f"matrix {name} has non-finite entries")
    return out


def to_dict(obj, realization=None):
    if isinstance(obj, QuantumLinearSystem):
        kind, dims = "plain", {"n": obj.n, "m": obj.m}
        mats = dict(zip(_MATRIX_NAMES["plain"], obj.matrices()))
    elif isinstance(obj, PartitionedSystem):
        kind, dims = "partitioned", {"n1": obj.n1, "n2": obj.n2, "m": obj.m}
        mats = obj.blocks()
    elif isinstance(obj, SpecialClassParams):
        kind, dims = "special_class", {"n1": obj.n1, "n2": obj.n2, "m": obj.m}
        mats = {name: getattr(obj, name) for name in _MATRIX_NAMES["special_class"]}
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "dims": dims,
        "matrices": {name: encode_matrix(mats[name]) for name in _MATRIX_NAMES[kind]},
    }
    if realization is not None:
        if kind != "plain":
            raise TypeError("a realization can only accompany a plain system")
        doc["realization"] = {name: encode_matrix(getattr(realization, name)) for name in _REALIZATION_NAMES}
    return doc


def _check_keys(mapping, allowed, required, where):
    if not isinstance(mapping, dict):
        raise FileFormatError(f"{where} must be an object")
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise FileFormatError(f"unknown field(s) in {where}: {', '.join(sorted(unknown))}")
    missing = set(required) - set(mapping)
    if missing:
        raise FileFormatError(f"missing field(s) in {where}: {', '.join(sorted(missing))}")


def from_dict(doc):
    _check_keys(doc, ("schema_version", "kind", "dims", "matrices", "realization"),
                ("schema_version", "kind", "dims", "matrices"), "system file")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise FileFormatError(f"unsupported schema_version {doc['schema_version']!r}")
    kind = doc["kind"]
    if kind not in _MATRIX_NAMES:
        raise FileFormatError(f"unknown kind {kind!r}")
    dim_names = _DIM_NAMES[kind]
    _check_keys(doc["dims"], dim_names, dim_names, "dims")
    dims = doc["dims"]
    for name in dim_names:
        value = dims[name]
        lower = 0 if name == "n2" else 1
        if not isinstance(value, int) or isinstance(value, bool) or value < lower:
            raise FileFormatError(f"dims.{name} must be an integer >= {lower}")
    names = _MATRIX_NAMES[kind]
    _check_keys(doc["matrices"], names, names, "matrices")
    shapes = _shapes(kind, dims)
    mats = {name: decode_matrix(doc["matrices"][name], shapes[name], name) for name in names}

    realization = None
    try:
        if kind == "plain":
            system = QuantumLinearSystem(**mats)
        elif kind == "partitioned":
            system = PartitionedSystem(**mats)
        else:
            system = SpecialClassParams(**mats)
        if "realization" in doc:
            if kind != "plain":
                raise FileFormatError("realization is only allowed for plain systems")
            _check_keys(doc["realization"], _REALIZATION_NAMES, _REALIZATION_NAMES, "realization")
            n, m = dims["n"], dims["m"]
            rshapes = {"Theta": (n, n), "S": (m, m), "Lambda": (m, n), "M": (n, n)}
            realization = PhysicalRealization(**{
                name: decode_matrix(doc["realization"][name], rshapes[name], name) for name in _REALIZATION_NAMES
            })
    except FileFormatError:
        raise
    except QSysError as exc:
        raise FileFormatError(str(exc)) from exc
    return SystemFile(kind, system, realization)


_PAIR = re.compile(r"\[\s+([^\s,\[\]]+),\s+([^\s,\[\]]+)\s+\]")


def dumps(obj, realization=None):
    text = json.dumps(to_dict(obj, realization), indent=2)
    return _PAIR.sub(r"[\1, \2]", text) + "\n"


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"not valid JSON: {exc}") from exc
    return from_dict(doc)


def write(path, obj, realization=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj, realization))


def read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    return loads(text)
