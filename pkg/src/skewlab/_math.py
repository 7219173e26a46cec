"""Small numeric helpers shared by several modules."""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi

# Floor used wherever a log magnitude would otherwise diverge (nulls,
# exact zeros from synthetic networks).
DB_FLOOR = -120.0


def wrap_phase(x):
    """Wrap angle(s) to (-pi, pi]."""
    w = np.remainder(np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi
    # remainder maps the upper edge to -pi; push it back so the interval
    # is half-open on the left
    w = np.where(w == -np.pi, np.pi, w)
    if np.ndim(x) == 0:
        return float(w)
    return w


def magnitude_db(x, floor: float = DB_FLOOR):
    """20*log10|x| clamped below at `floor` dB."""
    mag = np.abs(x)
    lo = 10.0 ** (floor / 20.0)
    return 20.0 * np.log10(np.maximum(mag, lo))


def unwrap_masked(phase: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Unwrap `phase` along its axis using only the `valid` points.

    Invalid points come back NaN. The first valid point keeps its wrapped
    value, so the anchor lies in (-pi, pi].
    """
    out = np.full(phase.shape, np.nan)
    idx = np.flatnonzero(valid)
    if idx.size:
        out[idx] = np.unwrap(phase[idx])
    return out
