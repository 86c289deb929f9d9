"""Log-log power-law fits over stabilizing windows."""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from app.exceptions import DomainError


class PowerLawFit(BaseModel):
    """y ~ C x^exponent on the points of `window` (indices into the inputs)."""

    exponent: float
    intercept: float
    window: Tuple[int, int]
    local_slopes: List[float] = Field(default_factory=list)
    max_deviation: float = 0.0
    residual: float = 0.0
    stable: bool = True

    @property
    def interval(self) -> Tuple[float, float]:
        return self.exponent - self.max_deviation, self.exponent + self.max_deviation


def local_slopes(x, y) -> np.ndarray:
    """Slopes of log y against log x between consecutive points."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.diff(ly) / np.diff(lx)


def least_squares(x, y) -> Tuple[float, float, float]:
    """(slope, intercept, rms residual) of log y against log x."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(residual**2)))


def stable_window(slopes: np.ndarray, tolerance: float, min_slopes: int = 3) -> Optional[Tuple[int, int]]:
    """Longest run of consecutive finite slopes with spread <= tolerance.

    Ties go to the run closest to the end of the array. Returns (first, last)
    slope indices, or None when no run of `min_slopes` exists.
    """
    best: Optional[Tuple[int, int]] = None
    n = len(slopes)
    for end in range(n - 1, min_slopes - 2, -1):
        start = end
        while start > 0:
            window = slopes[start - 1 : end + 1]
            if not np.all(np.isfinite(window)) or np.ptp(window) > tolerance:
                break
            start -= 1
        if not np.isfinite(slopes[end]):
            continue
        length = end - start + 1
        if length >= min_slopes and (best is None or length > best[1] - best[0] + 1):
            best = (start, end)
    return best


def fit_power_law(
    x, y, tolerance: Optional[float] = None, min_slopes: int = 3
) -> PowerLawFit:
    """Least-squares exponent of y against x.

    With a tolerance the fit uses only the longest window whose local slopes
    agree within it, and `stable` records whether such a window exists.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if len(x) < 2:
        raise DomainError("a power-law fit needs at least two positive points")
    slopes = local_slopes(x, y)
    window = (0, len(x) - 1)
    stable = True
    if tolerance is not None:
        run = stable_window(slopes, tolerance, min_slopes)
        if run is None:
            stable = False
        else:
            window = (run[0], run[1] + 1)
    i, j = window
    exponent, intercept, residual = least_squares(x[i : j + 1], y[i : j + 1])
    inside = slopes[i:j]
    deviation = float(np.max(np.abs(inside - exponent))) if len(inside) else 0.0
    return PowerLawFit(
        exponent=exponent,
        intercept=intercept,
        window=window,
        local_slopes=slopes.tolist(),
        max_deviation=deviation,
        residual=residual,
        stable=stable,
    )
