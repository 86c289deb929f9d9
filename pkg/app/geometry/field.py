"""Damping coefficients W built on damping shapes."""

from abc import ABC, abstractmethod
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator

from app.exceptions import DomainError
from app.geometry.shapes import Shape
from app.geometry.torus import TorusPoint, reduce_mod1, torus_distance
from app.logger import logger


class ExponentOverride(BaseModel):
    """Use `exponent` instead of the base exponent within `radius` of `location`."""

    model_config = ConfigDict(frozen=True)

    location: TorusPoint
    exponent: PositiveFloat
    radius: PositiveFloat = 0.05


class WeightField(ABC, BaseModel):
    """Anything that evaluates a nonnegative damping coefficient on the torus."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @abstractmethod
    def evaluate(self, z) -> np.ndarray:
        """W at an (N, 2) array of points."""

    @property
    def shape(self):
        return None

    @property
    def label(self) -> str:
        return type(self).__name__


class DampingField(WeightField):
    """W(z) = amplitude * d(z)^beta_eff, d the distance to the undamped region.

    With `support_cutoff` c the distance saturates as c*tanh(d/c), which keeps
    W smooth and positive deep inside omega. The `indicator` profile gives
    W = amplitude on omega.
    """

    damping_shape: Shape = Field(..., alias="shape")
    beta: PositiveFloat = 9.0
    overrides: List[ExponentOverride] = Field(default_factory=list)
    support_cutoff: Optional[PositiveFloat] = None
    profile: Literal["power", "indicator"] = "power"
    amplitude: PositiveFloat = 1.0
    name: str = "field"

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)

    @property
    def shape(self):
        return self.damping_shape

    @property
    def label(self) -> str:
        return self.name

    def exponent_at(self, z) -> np.ndarray:
        """Base exponent, or the nearest override whose radius covers z."""
        z = np.atleast_2d(np.asarray(z, dtype=float))
        exponents = np.full(len(z), self.beta)
        if not self.overrides:
            return exponents
        best = np.full(len(z), np.inf)
        for override in self.overrides:
            dist = torus_distance(z, override.location.as_array())
            take = (dist <= override.radius) & (dist < best)
            exponents[take] = override.exponent
            best[take] = dist[take]
        return exponents

    def exponent_near(self, location: TorusPoint) -> float:
        return float(self.exponent_at(location.as_array())[0])

    def depth(self, z) -> np.ndarray:
        d = self.damping_shape.distance_to_complement(z)
        if self.support_cutoff is not None:
            c = self.support_cutoff
            d = c * np.tanh(d / c)
        return d

    def evaluate(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        d = self.depth(z)
        inside = d > 0
        out = np.zeros(len(z))
        if self.profile == "indicator":
            out[inside] = self.amplitude
            return out
        out[inside] = self.amplitude * d[inside] ** self.exponent_at(z[inside])
        return out


class GridField(WeightField):
    """Raw N x N samples W[i, j] = W(i/N, j/N), periodic bilinear interpolation.

    Carries no shape or exponent metadata.
    """

    values: np.ndarray
    name: str = "grid"

    @field_validator("values", mode="before")
    @classmethod
    def _as_grid(cls, v):
        grid = np.asarray(v, dtype=float)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1] or grid.shape[0] < 2:
            raise DomainError(f"grid field must be N x N with N >= 2, got {grid.shape}")
        if np.any(grid < 0) or not np.all(np.isfinite(grid)):
            raise DomainError("grid field values must be finite and nonnegative")
        return grid

    @classmethod
    def sample(cls, field: WeightField, n: int) -> "GridField":
        axis = np.arange(n) / n
        pts = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
        return cls(values=field.evaluate(pts).reshape(n, n), name=f"{field.label}@{n}")

    @property
    def label(self) -> str:
        return self.name

    def evaluate(self, z) -> np.ndarray:
        z = reduce_mod1(np.atleast_2d(np.asarray(z, dtype=float)).copy())
        n = self.values.shape[0]
        gx, gy = z[:, 0] * n, z[:, 1] * n
        i0, j0 = np.floor(gx).astype(int) % n, np.floor(gy).astype(int) % n
        fx, fy = gx - np.floor(gx), gy - np.floor(gy)
        i1, j1 = (i0 + 1) % n, (j0 + 1) % n
        v = self.values
        return (
            v[i0, j0] * (1 - fx) * (1 - fy)
            + v[i1, j0] * fx * (1 - fy)
            + v[i0, j1] * (1 - fx) * fy
            + v[i1, j1] * fx * fy
        )


def evaluate_W(field: WeightField, z):
    """W at one point (float) or at an (N, 2) array of points."""
    if isinstance(z, TorusPoint):
        z = z.as_array()
    z = np.asarray(z, dtype=float)
    values = field.evaluate(z)
    return float(values[0]) if z.ndim == 1 else values


class RegularityReport(BaseModel):
    """Empirical constants of |d^alpha W| <= C W^(1 - |alpha|/4) on samples."""

    max_ratio: float
    per_order: Dict[int, float]
    worst_location: Optional[TorusPoint]
    worst_multiindex: Tuple[int, int]
    samples: int
    band: Optional[float]


_MULTIINDICES = [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]


def regularity_check(
    field: WeightField,
    sample_count: int = 2000,
    band: Optional[float] = 0.1,
    seed: int = 0,
    threshold: float = 1e-12,
    step: float = 1e-3,
) -> RegularityReport:
    """Finite-difference evidence for the derivative bounds of the damping class.

    Samples are drawn inside omega (within `band` of the boundary when a shape
    is known). The stencil step at a sample is min(step, d/10), so stencils
    stay inside omega. This is sampling evidence, not a certificate.
    """
    if sample_count < 100:
        raise DomainError(f"regularity check needs at least 100 samples, got {sample_count}")
    rng = np.random.default_rng(seed)
    shape = field.shape
    kept: List[np.ndarray] = []
    total = 0
    for _ in range(200):
        pts = rng.random((4 * sample_count, 2))
        w = field.evaluate(pts)
        mask = w > threshold
        if shape is not None:
            d = shape.distance_to_complement(pts)
            mask &= d > 0
            if band is not None:
                mask &= d < band
        kept.append(pts[mask])
        total += int(mask.sum())
        if total >= sample_count:
            break
    if total == 0:
        raise DomainError("no interior samples with positive W")
    pts = np.vstack(kept)[:sample_count]

    if shape is not None:
        h = np.minimum(step, 0.1 * shape.distance_to_complement(pts))
    else:
        h = np.full(len(pts), step)
    h = h[:, None]
    ex, ey = np.array([1.0, 0.0]), np.array([0.0, 1.0])

    def W(offset) -> np.ndarray:
        return field.evaluate(pts + offset)

    w0 = W(0.0)
    wxp, wxm = W(h * ex), W(-h * ex)
    wyp, wym = W(h * ey), W(-h * ey)
    hh = h[:, 0]
    derivs = {
        (1, 0): (wxp - wxm) / (2 * hh),
        (0, 1): (wyp - wym) / (2 * hh),
        (2, 0): (wxp - 2 * w0 + wxm) / hh**2,
        (0, 2): (wyp - 2 * w0 + wym) / hh**2,
        (1, 1): (W(h * (ex + ey)) - W(h * (ex - ey)) - W(h * (ey - ex)) + W(-h * (ex + ey)))
        / (4 * hh**2),
    }

    per_order = {0: 1.0, 1: 0.0, 2: 0.0}
    worst = (0.0, None, (0, 0))
    for alpha in _MULTIINDICES:
        order = sum(alpha)
        ratio = np.abs(derivs[alpha]) / w0 ** (1.0 - order / 4.0)
        i = int(np.argmax(ratio))
        per_order[order] = max(per_order[order], float(ratio[i]))
        if ratio[i] > worst[0]:
            worst = (float(ratio[i]), pts[i], alpha)

    logger.debug(f"Regularity check on {len(pts)} samples of {field.label}: {per_order}")
    return RegularityReport(
        max_ratio=max(per_order[1], per_order[2]),
        per_order=per_order,
        worst_location=None if worst[1] is None else TorusPoint.from_array(worst[1]),
        worst_multiindex=worst[2],
        samples=len(pts),
        band=band if shape is not None else None,
    )
