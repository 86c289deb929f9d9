"""Damping shapes: periodic strips, unions, the scene-level discriminated union,
and the shape operations used by the analyzers."""

import math
from typing import Annotated, ClassVar, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.exceptions import DomainError
from app.geometry.base import (
    Arc,
    Chord,
    Contact,
    DampingShape,
    merge_chords,
)
from app.geometry.curves import Disk, ParametricShape, SmoothCurve, SuperEllipse
from app.geometry.polygon import Polygon
from app.geometry.torus import LATTICE_BLOCK, DirectionFrame, TorusPoint
from app.logger import logger


class Strip(DampingShape):
    """Band {lo < z.normal < hi (mod 1)} around a closed geodesic family.

    `normal` is an integer vector, so the band is periodic and needs no lift.
    """

    kind: Literal["strip"] = "strip"
    normal: Tuple[int, int]
    lo: float
    hi: float

    periodic: ClassVar[bool] = True

    @model_validator(mode="after")
    def _check_band(self) -> "Strip":
        if self.normal == (0, 0):
            raise DomainError("strip normal must be a nonzero integer vector")
        if not 0.0 < self.hi - self.lo < 1.0:
            raise DomainError(f"strip width hi - lo must lie in (0, 1), got {self.hi - self.lo}")
        return self

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def _n(self) -> np.ndarray:
        return np.asarray(self.normal, dtype=float)

    @property
    def _n_norm(self) -> float:
        return float(np.linalg.norm(self._n))

    def local_signed_distance(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        u = np.mod(points @ self._n - self.lo, 1.0)
        w = self.width
        inside = (u > 0) & (u < w)
        outside_gap = np.minimum(np.abs(u - w), np.minimum(u, 1.0 - u))
        return np.where(inside, np.minimum(u, w - u), -outside_gap) / self._n_norm

    def distance_to_complement(self, z) -> np.ndarray:
        return np.maximum(self.local_signed_distance(z), 0.0)

    def contains(self, z, tol: Optional[float] = None) -> np.ndarray:
        tol = self.boundary_tolerance if tol is None else tol
        return self.local_signed_distance(z) > tol

    def local_chords(self, p0, u, length: float) -> List[Chord]:
        p0 = np.asarray(p0, dtype=float)
        rate = float(np.asarray(u, dtype=float) @ self._n)
        sigma0 = float(p0 @ self._n)
        if abs(rate) < 1e-15:
            inside = 0.0 < (sigma0 - self.lo) % 1.0 < self.width
            return [(0.0, length)] if inside else []
        ends = sorted((sigma0, sigma0 + rate * length))
        chords = []
        for k in range(math.floor(ends[0] - self.hi), math.ceil(ends[1] - self.lo) + 1):
            t0, t1 = sorted(((self.lo + k - sigma0) / rate, (self.hi + k - sigma0) / rate))
            a, b = max(t0, 0.0), min(t1, length)
            if b > a:
                chords.append((a, b))
        return merge_chords(chords)

    def chords(self, p0, u, length: float) -> List[Chord]:
        return self.local_chords(p0, u, length)

    def shadow_arcs(self, frame: DirectionFrame) -> List[Arc]:
        v = frame.direction
        c = frame.s_circumference
        if abs(float(v.unit @ self._n)) > 1e-12:
            # every geodesic of the family crosses the band
            return [(0.0, 2.0 * c)]
        rate = float(v.perp @ self._n)
        laps = int(round(abs(rate) * c))
        arcs = []
        for k in range(laps):
            s0, s1 = sorted(((self.lo + k) / rate, (self.hi + k) / rate))
            arcs.append((float(np.mod(s0, c)), s1 - s0))
        return arcs

    def support(self, w) -> Tuple[float, float]:
        return -math.inf, math.inf

    def bounding_box(self) -> np.ndarray:
        return np.array([0.0, 0.0, 1.0, 1.0])

    def boundary_points(self, n: int) -> np.ndarray:
        tangent = np.array([-self._n[1], self._n[0]])
        t = np.linspace(0.0, 1.0, max(n // 2, 1), endpoint=False)[:, None] * tangent
        base = self._n / self._n_norm**2
        return np.vstack([self.lo * base + t, self.hi * base + t])

    def diameter(self) -> float:
        return math.inf

    def exact_inradius(self) -> Optional[float]:
        return 0.5 * self.width / self._n_norm

    def contacts(self, w, level: float, tol: float) -> List[Contact]:
        return []

    def contacts_on_line(self, frame: DirectionFrame, s: float, tol: float) -> List[Contact]:
        v = frame.direction
        if abs(float(v.unit @ self._n)) > 1e-12:
            return []
        rate = float(v.perp @ self._n)
        sigma = s * rate
        found = []
        for edge in (self.lo, self.hi):
            gap = (sigma - edge) % 1.0
            if min(gap, 1.0 - gap) <= tol * abs(rate):
                found.append(
                    Contact(point=tuple(frame.to_plane(s, 0.0)), owner=self, kind="line")
                )
                break
        return found

    def boundary_branches(self, contact: Contact, radii) -> List[np.ndarray]:
        tangent = np.array([-self._n[1], self._n[0]]) / self._n_norm
        z0 = contact.as_array()
        radii = np.asarray(radii, dtype=float)[:, None]
        return [z0 + radii * tangent, z0 - radii * tangent]

    def translated(self, offset) -> "Strip":
        shift = float(np.asarray(offset, dtype=float) @ self._n)
        return self._replace(lo=self.lo + shift, hi=self.hi + shift)

    def rotated(self, theta: float, about=None) -> "Strip":
        raise DomainError("a periodic strip cannot be rotated off the lattice")


class ShapeUnion(DampingShape):
    """Union of damping shapes; omega is the union of the members' open sets."""

    kind: Literal["union"] = "union"
    members: List["Shape"]

    @model_validator(mode="after")
    def _check_members(self) -> "ShapeUnion":
        if not self.members:
            raise DomainError("a union needs at least one member")
        return self

    def parts(self) -> List[DampingShape]:
        return [part for member in self.members for part in member.parts()]

    @property
    def has_periodic_part(self) -> bool:
        return any(part.periodic for part in self.parts())

    def local_signed_distance(self, points) -> np.ndarray:
        return np.max([m.local_signed_distance(points) for m in self.members], axis=0)

    def distance_to_complement(self, z) -> np.ndarray:
        return np.max([m.distance_to_complement(z) for m in self.members], axis=0)

    def contains(self, z, tol: Optional[float] = None) -> np.ndarray:
        return np.any([m.contains(z, tol) for m in self.members], axis=0)

    def local_chords(self, p0, u, length: float) -> List[Chord]:
        return merge_chords([c for m in self.members for c in m.local_chords(p0, u, length)])

    def chords(self, p0, u, length: float) -> List[Chord]:
        return merge_chords([c for m in self.members for c in m.chords(p0, u, length)])

    def shadow_arcs(self, frame: DirectionFrame) -> List[Arc]:
        return [arc for m in self.members for arc in m.shadow_arcs(frame)]

    def contacts_on_line(self, frame: DirectionFrame, s: float, tol: float) -> List[Contact]:
        return [c for m in self.members for c in m.contacts_on_line(frame, s, tol)]

    def support(self, w) -> Tuple[float, float]:
        bounds = [m.support(w) for m in self.members]
        return min(b[0] for b in bounds), max(b[1] for b in bounds)

    def bounding_box(self) -> np.ndarray:
        if self.has_periodic_part:
            return np.array([0.0, 0.0, 1.0, 1.0])
        boxes = np.array([m.bounding_box() for m in self.members])
        return np.concatenate([boxes[:, :2].min(axis=0), boxes[:, 2:].max(axis=0)])

    def boundary_points(self, n: int) -> np.ndarray:
        share = max(n // len(self.members), 8)
        return np.vstack([m.boundary_points(share) for m in self.members])

    def feature_points(self) -> np.ndarray:
        return np.vstack([m.feature_points() for m in self.members] + [np.zeros((0, 2))])

    def diameter(self) -> float:
        if self.has_periodic_part:
            return math.inf
        return super().diameter()

    def contacts(self, w, level: float, tol: float) -> List[Contact]:
        return [c for m in self.members for c in m.contacts(w, level, tol)]

    def boundary_branches(self, contact: Contact, radii) -> List[np.ndarray]:
        return contact.owner.boundary_branches(contact, radii)

    def translated(self, offset) -> "ShapeUnion":
        return ShapeUnion(members=[m.translated(offset) for m in self.members])

    def rotated(self, theta: float, about=None) -> "ShapeUnion":
        about = self.reference_point() if about is None else about
        return ShapeUnion(members=[m.rotated(theta, about) for m in self.members])


Shape = Annotated[
    Union[Polygon, Disk, SuperEllipse, SmoothCurve, Strip, ShapeUnion],
    Field(discriminator="kind"),
]

ShapeUnion.model_rebuild()


class InradiusEstimate(BaseModel):
    """Certified bracket [lower, upper] on the inradius, with the best center found."""

    model_config = ConfigDict(frozen=True)

    lower: float
    upper: float
    center: TorusPoint
    certified: bool = True

    @property
    def value(self) -> float:
        return self.lower


# -- operations -------------------------------------------------------------


def _as_points(z) -> np.ndarray:
    return z.as_array() if isinstance(z, TorusPoint) else np.asarray(z, dtype=float)


def contains(shape: DampingShape, z) -> bool:
    """z in omega; points within the boundary tolerance count as outside."""
    return bool(shape.contains(_as_points(z))[0])


def distance_to_complement(shape: DampingShape, z):
    """d(z) for one point (float) or an (N, 2) array of points."""
    z = _as_points(z)
    values = shape.distance_to_complement(z)
    return float(values[0]) if z.ndim == 1 else values


def support_interval(shape: DampingShape, frame: DirectionFrame) -> List[Arc]:
    """Shadow arcs (start, length) of omega on the s-circle of the frame."""
    return shape.shadow_arcs(frame)


def line_chords(shape: DampingShape, p0, u, length: float) -> List[Chord]:
    """Inside intervals of the segment p0 + t*u, t in [0, length], on the torus."""
    return shape.chords(p0, u, length)


def inradius(
    shape: DampingShape,
    tolerance: float = 1e-6,
    max_cells: int = 20000,
    initial: int = 32,
) -> InradiusEstimate:
    """Branch and bound maximization of d over the bounding box.

    d is 1-Lipschitz, so a cell of half-diagonal rho whose center has value
    d_c cannot exceed d_c + rho; cells below the best value found are pruned.
    """
    exact = shape.exact_inradius()
    if exact is not None:
        return InradiusEstimate(lower=exact, upper=exact, center=_exact_center(shape))

    box = shape.bounding_box()
    hx = (box[2] - box[0]) / initial
    hy = (box[3] - box[1]) / initial
    gx = box[0] + (np.arange(initial) + 0.5) * hx
    gy = box[1] + (np.arange(initial) + 0.5) * hy
    centers = np.stack(np.meshgrid(gx, gy, indexing="ij"), axis=-1).reshape(-1, 2)
    dropped_upper = -math.inf
    best_value, best_center = 0.0, centers[0]
    certified = True

    for _ in range(60):
        values = shape.distance_to_complement(centers)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value, best_center = float(values[i]), centers[i]
        slack = 0.5 * math.hypot(hx, hy)
        upper_cells = values + slack
        upper = max(float(upper_cells.max()), dropped_upper)
        if upper - best_value <= tolerance:
            break
        keep = upper_cells >= best_value
        centers, upper_cells = centers[keep], upper_cells[keep]
        if 4 * len(centers) > max_cells:
            order = np.argsort(upper_cells)[::-1]
            cut = max_cells // 4
            dropped_upper = max(dropped_upper, float(upper_cells[order[cut]]))
            centers = centers[order[:cut]]
            certified = False
        hx, hy = 0.5 * hx, 0.5 * hy
        offsets = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]]) * (0.5 * np.array([hx, hy]))
        centers = (centers[:, None, :] + offsets[None, :, :]).reshape(-1, 2)

    if best_value <= 0.0:
        raise DomainError("shape has empty interior")
    if not certified:
        logger.warning(
            f"Inradius bracket truncated at {max_cells} cells: [{best_value:.6g}, {upper:.6g}]"
        )
    return InradiusEstimate(
        lower=best_value,
        upper=max(upper, best_value),
        center=TorusPoint.from_array(best_center),
        certified=certified,
    )


def _exact_center(shape: DampingShape) -> TorusPoint:
    if isinstance(shape, Strip):
        n = np.asarray(shape.normal, dtype=float)
        return TorusPoint.from_array(0.5 * (shape.lo + shape.hi) * n / (n @ n))
    return TorusPoint.from_array(shape.reference_point())


def proper_projection_check(shape: DampingShape, tol: float = 1e-12) -> bool:
    """The closure of omega embeds in the torus.

    Periodic strips are proper by construction; for the other parts the
    diameter shortcut is tried first, then boundary samples of each nonzero
    translate in the 3x3 block are tested against the lift.
    """
    for part in shape.parts():
        if part.periodic:
            continue
        if part.diameter() < 1.0:
            continue
        samples = part.boundary_points(2048)
        for k in LATTICE_BLOCK:
            if not k.any():
                continue
            if np.any(part.local_signed_distance(samples + k) > -tol):
                return False
    return True


def curvature(curve: DampingShape, t) -> np.ndarray:
    """Curvature of a curved boundary at parameter(s) t."""
    if not isinstance(curve, ParametricShape):
        raise DomainError(f"curvature is defined for curved shapes, not '{curve.kind}'")
    values = curve.curvature_at(np.asarray(t, dtype=float))
    return float(values) if np.ndim(values) == 0 else values
