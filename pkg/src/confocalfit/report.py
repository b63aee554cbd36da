"""JSON report assembly: deterministic serialization of analysis results.

Numbers are rounded to nine significant digits before serialization so that
identical inputs always produce byte-identical output; non-finite values
(the infinite second degree of freedom) serialize as null.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Any

import numpy as np

from .dataset import Dataset
from .geometry import FlatSubspace, Hyperplane
from .pencil import ConfocalPencil, JacobiCoordinates
from .regression import FitResult, TestReport

SIGNIFICANT_DIGITS = 9


def round_floats(obj: Any) -> Any:
    """Recursively round floats to nine significant digits; None for non-finite."""
    if isinstance(obj, dict):
        return {key: round_floats(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(value) for value in obj]
    if isinstance(obj, (bool, np.bool_)):  # bool is an int: keep it boolean
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if not math.isfinite(value):
            return None
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    return obj


def dumps(report: dict | list) -> str:
    return json.dumps(round_floats(report), indent=2) + "\n"


def dataset_block(ds: Dataset) -> dict:
    return {"n": ds.n_rows, "k": ds.n_cols, "path": ds.path}


def pencil_block(pencil: ConfocalPencil) -> dict:
    return {
        "center": pencil.center.tolist(),
        "frame": pencil.frame.tolist(),
        "poles": pencil.poles.tolist(),
        "principal_moments": pencil.principal_moments.tolist(),
        "mass": pencil.mass,
    }


def fit_block(fit: FitResult) -> dict:
    entry: dict[str, Any] = {"role": fit.role, "moment": fit.moment}
    flat = fit.flat
    if isinstance(flat, Hyperplane):
        entry["normal"] = flat.normal.tolist()
        entry["offset"] = flat.offset
        entry["basis"] = flat.as_flat().basis.T.tolist()
    elif isinstance(flat, FlatSubspace):
        entry["normal"] = None
        entry["offset"] = None
        entry["basis"] = flat.basis.T.tolist()
    return entry


def jacobi_block(
    pencil: ConfocalPencil, point: np.ndarray, coords: JacobiCoordinates
) -> dict:
    return {
        "point": np.asarray(point, dtype=float).tolist(),
        "point_principal": pencil.to_principal(point).tolist(),
        "lambdas": coords.lambdas.tolist(),
        "degenerate": [bool(flag) for flag in coords.degenerate],
    }


def test_block(result: TestReport) -> dict:
    return {
        "statistic": result.statistic,
        "df1": result.df1,
        "df2": None if math.isinf(result.df2) else int(result.df2),
        "p_value": result.p_value,
        "best_moment": result.best_moment,
        "restricted_moment": result.restricted_moment,
    }


def load_schema() -> dict:
    text = resources.files("confocalfit").joinpath("report_schema.json").read_text()
    return json.loads(text)
