"""Algebra JSON files: structure constants plus an optional transform family.

::

    {"dim": 4, "basis": ["e0", ...], "params": ["lambda"],
     "constants": [{"m": 0, "n": 1, "l": 1, "coeff": "1"}, ...],
     "transform": {"param": "lambda", "critical": "0", "matrix": [["1", "0"], ...]}}

Indices are 0-based; omitted constants are zero.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .algebra import AlgebraError, StructureTensor
from .coeffring import CoeffError, ExpressionSyntaxError, parse_gauss
from .contraction import TransformFamily


class FileFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


@dataclass
class AlgebraFile:
    tensor: StructureTensor
    transform: TransformFamily | None = None
    critical: object = None


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _coeff_location(text: str, index: int, pos: int = 0) -> tuple[int, int] | tuple[None, None]:
    matches = list(re.finditer(r'"coeff"\s*:\s*"', text))
    if index < len(matches):
        return _line_col(text, matches[index].end() + pos)
    return None, None


def loads(text: str) -> AlgebraFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise FileFormatError("top level must be an object")
    for key in ("dim", "constants"):
        if key not in data:
            raise FileFormatError(f"missing required key {key!r}")
    # parse entries one by one so errors can be located
    for k, c in enumerate(data["constants"]):
        try:
            StructureTensor.from_json({**data, "constants": [c], "dim": data["dim"]})
        except ExpressionSyntaxError as exc:
            line, col = _coeff_location(text, k, exc.position)
            raise FileFormatError(f"constants[{k}].coeff: {exc.args[0]}", line, col) from None
        except (CoeffError, AlgebraError, KeyError, TypeError, ValueError) as exc:
            line, col = _coeff_location(text, k)
            raise FileFormatError(f"constants[{k}]: {exc}", line, col) from None
    tensor = StructureTensor.from_json(data)
    tr = data.get("transform")
    if tr is None:
        return AlgebraFile(tensor)
    try:
        T = TransformFamily(tr["matrix"], tr["param"], tensor.params)
        critical = parse_gauss(str(tr["critical"])) if "critical" in tr else None
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"transform: missing or malformed field {exc}") from None
    except (CoeffError, ExpressionSyntaxError, ArithmeticError, ValueError) as exc:
        raise FileFormatError(f"transform: {exc}") from None
    return AlgebraFile(tensor, T, critical)


def load(path: str | Path) -> AlgebraFile:
    return loads(Path(path).read_text())


def dumps(tensor: StructureTensor, transform: TransformFamily | None = None, critical=None) -> str:
    data = tensor.to_json()
    if transform is not None:
        data["transform"] = transform.to_json(critical)
    return json.dumps(data, indent=2)
