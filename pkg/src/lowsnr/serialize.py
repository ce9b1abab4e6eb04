"""JSON schemas and CSV output shared by the CLI and external tools.

Mixture schema:  {"dim": d, "centers": [[...], ...], "weights": [...]}
Group schema:    {"dim": d, "elements": [[[row], ...], ...], "weights": [...]}

Schema violations raise SchemaError with a path-qualified message (the
CLI maps these to exit code 2).  CSV floats are written with 17
significant digits so outputs round-trip and runs are byte-comparable.
"""

import json
from pathlib import Path

import numpy as np

from .core import DiscreteMixture
from .exceptions import SchemaError
from .groups import FiniteGroupAction

__all__ = [
    "mixture_to_dict",
    "mixture_from_dict",
    "load_mixture",
    "save_mixture",
    "group_to_dict",
    "group_from_dict",
    "load_group",
    "format_float",
    "write_csv",
]


def format_float(x) -> str:
    """17 significant digits; enough to round-trip any float64."""
    return format(float(x), ".17g")


def mixture_to_dict(mix: DiscreteMixture) -> dict:
    return {
        "dim": mix.dim,
        "centers": mix.centers.tolist(),
        "weights": mix.weights.tolist(),
    }


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise SchemaError(f"{path}: {message}")


def mixture_from_dict(data: dict, path: str = "mixture") -> DiscreteMixture:
    _require(isinstance(data, dict), path, "must be a JSON object")
    for key in ("dim", "centers", "weights"):
        _require(key in data, f"{path}.{key}", "missing required field")
    dim = data["dim"]
    _require(isinstance(dim, int) and dim >= 1, f"{path}.dim", "must be a positive integer")
    try:
        centers = np.array(data["centers"], dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{path}.centers: must be a rectangular numeric array") from None
    _require(centers.ndim == 2, f"{path}.centers", "must be a list of vectors")
    _require(
        centers.shape[1] == dim,
        f"{path}.centers",
        f"vectors have length {centers.shape[1]}, expected dim = {dim}",
    )
    try:
        weights = np.array(data["weights"], dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{path}.weights: must be a numeric array") from None
    _require(
        weights.shape == (centers.shape[0],),
        f"{path}.weights",
        f"length {weights.shape} does not match {centers.shape[0]} centers",
    )
    try:
        return DiscreteMixture(centers, weights)
    except ValueError as exc:
        raise SchemaError(f"{path}.weights: {exc}") from None


def load_mixture(path) -> DiscreteMixture:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{p}: invalid JSON ({exc})") from None
    return mixture_from_dict(data, path=str(p))


def save_mixture(mix: DiscreteMixture, path):
    Path(path).write_text(json.dumps(mixture_to_dict(mix), indent=2) + "\n")


def group_to_dict(group: FiniteGroupAction) -> dict:
    return {
        "dim": group.dim,
        "elements": group.elements.tolist(),
        "weights": group.weights.tolist(),
    }


def group_from_dict(data: dict, path: str = "group") -> FiniteGroupAction:
    _require(isinstance(data, dict), path, "must be a JSON object")
    for key in ("dim", "elements", "weights"):
        _require(key in data, f"{path}.{key}", "missing required field")
    dim = data["dim"]
    _require(isinstance(dim, int) and dim >= 1, f"{path}.dim", "must be a positive integer")
    try:
        elements = np.array(data["elements"], dtype=float)
        weights = np.array(data["weights"], dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{path}.elements: must be numeric arrays") from None
    _require(
        elements.ndim == 3 and elements.shape[1:] == (dim, dim),
        f"{path}.elements",
        f"must be a list of {dim}x{dim} matrices",
    )
    try:
        return FiniteGroupAction(elements, weights)
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def load_group(path) -> FiniteGroupAction:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{p}: invalid JSON ({exc})") from None
    return group_from_dict(data, path=str(p))


def write_csv(path, header: list[str], rows: list[list]) -> None:
    """Write a deterministic CSV: header row, '\\n' newlines, 17-digit floats."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            elif isinstance(cell, (float, np.floating)):
                cells.append(format_float(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")
