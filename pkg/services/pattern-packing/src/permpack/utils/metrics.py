# services/pattern-packing/src/permpack/utils/metrics.py
from typing import Dict, Literal, Sequence

import numpy as np


def calculate_metrics(reference: Sequence[float], estimate: Sequence[float]) -> Dict[str, float]:
    """MAE, RMSE and max absolute error between reference values and estimates"""
    reference = np.asarray(reference, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    diff = np.abs(reference - estimate)

    return {
        "mae": float(np.mean(diff)),
        "rmse": float(np.sqrt(np.mean(diff**2))),
        "max_abs_error": float(np.max(diff)),
    }


def sequence_metrics(
    values: Sequence[float], sense: Literal["non-decreasing", "non-increasing"]
) -> Dict[str, float]:
    """Worst monotonicity violation and last increment of a bound sequence"""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return {"max_violation": 0.0, "last_increment": 0.0, "total_change": 0.0}
    steps = np.diff(values)
    violations = -steps if sense == "non-decreasing" else steps

    return {
        "max_violation": float(max(violations.max(), 0.0)),
        "last_increment": float(steps[-1]),
        "total_change": float(values[-1] - values[0]),
    }
