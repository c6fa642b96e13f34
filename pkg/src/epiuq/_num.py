"""Shared numeric output policy for uncertainty measures."""
from __future__ import annotations

from .exceptions import NumericalError

# Scores this far below zero are float noise; anything lower is a bug.
NOISE_TOL = 1e-12


def clamp_score(value: float, measure: str) -> float:
    """Snap tiny negative noise to zero, reject real negatives."""
    value = float(value)
    if value < 0.0:
        if value < -NOISE_TOL:
            raise NumericalError(f"{measure} produced {value!r}, below the -{NOISE_TOL} noise floor")
        return 0.0
    return value
