"""JSON readers and writers for operators, states and Bell expressions."""

from __future__ import annotations

import json
from pathlib import Path

from .di import BellExpression
from .linalg import DensityMatrix, HermitianOperator

__all__ = [
    "dumps",
    "load_json",
    "save_json",
    "read_operator",
    "read_state",
    "read_expression",
    "write_operator",
    "write_state",
]


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def save_json(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_operator(path) -> HermitianOperator:
    return HermitianOperator.from_dict(load_json(path))


def read_state(path) -> DensityMatrix:
    return DensityMatrix.from_dict(load_json(path))


def read_expression(path) -> BellExpression:
    return BellExpression.from_dict(load_json(path))


def write_operator(op: HermitianOperator, path) -> None:
    save_json(HermitianOperator.to_dict(op), path)


def write_state(rho: DensityMatrix, path) -> None:
    save_json(rho.to_dict(), path)
