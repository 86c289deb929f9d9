"""Distances to the model curves x = c|y|^eta that bracket glancing points of order eta."""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveFloat

from app.exceptions import DomainError
from app.geometry.base import golden_minimize
from app.logger import logger


CHUNK = 512


class ModelCurve(BaseModel):
    """Gamma_c = {(x, y) : c |y|^eta = x}."""

    model_config = ConfigDict(frozen=True)

    eta: PositiveFloat
    c: PositiveFloat

    def x_of(self, y) -> np.ndarray:
        return self.c * np.abs(np.asarray(y, dtype=float)) ** self.eta

    def swapped(self) -> "ModelCurve":
        """The curve whose upper half is the mirror of this one in the diagonal."""
        return ModelCurve(eta=1.0 / self.eta, c=self.c ** (-1.0 / self.eta))


class SandwichReport(BaseModel):
    """Spread of dist / model gap over a point cloud near the vertex."""

    eta: float
    c: float
    epsilon: float
    count: int
    excluded: int
    min_ratio: float
    max_ratio: float

    @property
    def constant(self) -> float:
        return max(self.max_ratio, 1.0 / self.min_ratio)

    @property
    def bounded(self) -> bool:
        return 0.0 < self.min_ratio and math.isfinite(self.max_ratio)


def _as_points(points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 2:
        raise DomainError("points must have two coordinates")
    if np.any(pts[:, 0] < 0):
        raise DomainError("model-curve distances need x >= 0")
    return pts


def _brute_force(curve: ModelCurve, pts: np.ndarray, samples: int) -> np.ndarray:
    x0, y0 = pts[:, 0:1], pts[:, 1:2]
    # any minimizer satisfies |y - y0| <= |x0 - c|y0|^eta|
    reach = np.abs(y0) + np.maximum(x0, curve.x_of(y0)) + 1e-300
    grid = np.linspace(-1.0, 1.0, samples)[None, :] * 2.0 * reach
    d2 = (curve.x_of(grid) - x0) ** 2 + (grid - y0) ** 2
    j = np.argmin(d2, axis=1)
    rows = np.arange(len(pts))
    step = grid[:, 1] - grid[:, 0]
    centre = grid[rows, j]

    def squared(y):
        return (curve.x_of(y) - x0[:, 0]) ** 2 + (y - y0[:, 0]) ** 2

    _, best = golden_minimize(squared, centre - step, centre + step, iterations=90)
    return np.sqrt(np.minimum(best, d2[rows, j]))


def exact_distance(curve: ModelCurve, points, samples: int = 100_001) -> np.ndarray:
    """dist(z, Gamma_c) for each z = (x0, y0) with x0 >= 0.

    For eta = 1 the curve is a wedge and the distance is |c|y0| - x0| / sqrt(1 + c^2).
    Otherwise a dense parameter grid brackets the minimizer, which golden-section
    search refines.
    """
    pts = _as_points(points)
    if curve.eta == 1.0:
        return np.abs(curve.c * np.abs(pts[:, 1]) - pts[:, 0]) / math.sqrt(1.0 + curve.c**2)
    per_chunk = max(1, CHUNK * 4096 // samples)
    return np.concatenate(
        [_brute_force(curve, pts[i : i + per_chunk], samples) for i in range(0, len(pts), per_chunk)]
    )


def swapped_distance(curve: ModelCurve, points, samples: int = 100_001) -> np.ndarray:
    """Distance of (y0, x0) to the swapped curve; equals exact_distance in the first quadrant."""
    pts = _as_points(points)
    if np.any(pts[:, 1] < 0):
        raise DomainError("the diagonal mirror only matches the upper half of the curve")
    return exact_distance(curve.swapped(), pts[:, ::-1], samples)


def model_gap(curve: ModelCurve, points) -> np.ndarray:
    """||y0|^eta - x0/c| for eta >= 1, ||y0| - (x0/c)^(1/eta)| for eta <= 1."""
    pts = _as_points(points)
    x0, y0 = pts[:, 0], np.abs(pts[:, 1])
    if curve.eta >= 1.0:
        return np.abs(y0**curve.eta - x0 / curve.c)
    return np.abs(y0 - (x0 / curve.c) ** (1.0 / curve.eta))


def sample_cloud(epsilon: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in [0, eps] x [-eps, eps]."""
    return np.column_stack(
        [rng.uniform(0.0, epsilon, count), rng.uniform(-epsilon, epsilon, count)]
    )


def sandwich_check(
    curve: ModelCurve,
    points,
    epsilon: float = 0.1,
    samples: int = 4097,
    floor: float = 1e-12,
) -> SandwichReport:
    """Empirical constants C with C^-1 gap <= dist <= C gap near the vertex.

    Points on the curve, where both sides vanish, are left out.
    """
    if not 0 < epsilon <= 0.1:
        raise DomainError(f"epsilon must lie in (0, 0.1], got {epsilon}")
    pts = _as_points(points)
    if np.any(np.abs(pts) > epsilon * (1 + 1e-12)):
        raise DomainError("points must lie in the epsilon box around the vertex")
    dist = exact_distance(curve, pts, samples)
    gap = model_gap(curve, pts)
    keep = (gap > floor) & (dist > floor)
    if not keep.any():
        raise DomainError("every point lies on the curve")
    ratio = dist[keep] / gap[keep]
    report = SandwichReport(
        eta=curve.eta,
        c=curve.c,
        epsilon=epsilon,
        count=int(keep.sum()),
        excluded=int((~keep).sum()),
        min_ratio=float(ratio.min()),
        max_ratio=float(ratio.max()),
    )
    logger.debug(
        f"Model curve eta={curve.eta:g}, c={curve.c:g}, eps={epsilon:g}: ratios in "
        f"[{report.min_ratio:.4g}, {report.max_ratio:.4g}]"
    )
    return report


def sandwich_sweep(
    curve: ModelCurve, epsilons, count: int = 10_000, seed: Optional[int] = None
) -> list:
    """sandwich_check on fresh seeded clouds for each epsilon."""
    rng = np.random.default_rng(seed)
    return [sandwich_check(curve, sample_cloud(eps, count, rng), eps) for eps in epsilons]
