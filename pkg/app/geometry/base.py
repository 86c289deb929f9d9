"""Shared machinery for damping shapes: torus lifting, chords and shadow arcs."""

import math
from abc import ABC, abstractmethod
from typing import Callable, ClassVar, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.config import config
from app.geometry.torus import LATTICE_BLOCK, DirectionFrame, minimal_image


Chord = Tuple[float, float]
Arc = Tuple[float, float]  # (start, length) on a circle

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_minimize(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    iterations: int = 64,
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized golden-section search; every bracket is refined independently.

    Returns the abscissae and values of the best interior points.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    c = hi - INVPHI * (hi - lo)
    d = lo + INVPHI * (hi - lo)
    fc = f(c)
    fd = f(d)
    for _ in range(iterations):
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        trial = np.where(left, hi - INVPHI * (hi - lo), lo + INVPHI * (hi - lo))
        ftrial = f(trial)
        c, d, fc, fd = (
            np.where(left, trial, d),
            np.where(left, c, trial),
            np.where(left, ftrial, fd),
            np.where(left, fc, ftrial),
        )
    take_c = fc <= fd
    return np.where(take_c, c, d), np.where(take_c, fc, fd)


def merge_chords(chords: List[Chord], gap: float = 0.0) -> List[Chord]:
    """Sort and merge overlapping or abutting intervals."""
    merged: List[List[float]] = []
    for a, b in sorted(chords):
        if b <= a:
            continue
        if merged and a <= merged[-1][1] + gap:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def chords_from_crossings(
    crossings, length: float, inside: Callable[[np.ndarray], np.ndarray]
) -> List[Chord]:
    """Turn boundary crossings along [0, length] into inside intervals.

    The segment is cut at every crossing and each piece is kept when its
    midpoint is inside.
    """
    cuts = np.unique(np.clip(np.concatenate([[0.0, length], crossings]), 0.0, length))
    if len(cuts) < 2:
        return []
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    keep = inside(mids)
    chords = [(float(a), float(b)) for a, b, k in zip(cuts[:-1], cuts[1:], keep) if k]
    return merge_chords(chords)


class Contact(BaseModel):
    """A boundary point lying on a glancing line, in lifted plane coordinates."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    point: Tuple[float, float]
    owner: "DampingShape"
    kind: Literal["point", "vertex", "edge", "line"] = "point"
    param: float = Field(0.0, description="Curve parameter or vertex index")

    def as_array(self) -> np.ndarray:
        return np.array(self.point)


class DampingShape(ABC, BaseModel):
    """Geometric damping region omega, described by one lift in the plane."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    periodic: ClassVar[bool] = False

    # -- local geometry of a single lift ---------------------------------

    @abstractmethod
    def local_signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Distance to the boundary, positive inside the lift and <= 0 outside."""

    @abstractmethod
    def local_chords(self, p0: np.ndarray, u: np.ndarray, length: float) -> List[Chord]:
        """Parameter intervals of p0 + t*u, t in [0, length], inside the lift."""

    @abstractmethod
    def support(self, w: np.ndarray) -> Tuple[float, float]:
        """(min, max) of z . w over the closed lift."""

    @abstractmethod
    def bounding_box(self) -> np.ndarray:
        """[xmin, ymin, xmax, ymax] of the lift."""

    @abstractmethod
    def boundary_points(self, n: int) -> np.ndarray:
        """Roughly n points sampled along the boundary of the lift."""

    @abstractmethod
    def contacts(self, w: np.ndarray, level: float, tol: float) -> List[Contact]:
        """Boundary points of the lift on the line {z . w = level}."""

    @abstractmethod
    def boundary_branches(self, contact: Contact, radii: np.ndarray) -> List[np.ndarray]:
        """Boundary points at each distance in radii from the contact, per branch."""

    @abstractmethod
    def translated(self, offset) -> "DampingShape":
        """Copy moved by offset."""

    @abstractmethod
    def rotated(self, theta: float, about=None) -> "DampingShape":
        """Copy rotated by theta around `about` (default: the reference point)."""

    def reference_point(self) -> np.ndarray:
        box = self.bounding_box()
        return 0.5 * (box[:2] + box[2:])

    def exact_inradius(self) -> Optional[float]:
        return None

    def parts(self) -> List["DampingShape"]:
        return [self]

    def feature_points(self) -> np.ndarray:
        return np.zeros((0, 2))

    def diameter(self) -> float:
        pts = self.boundary_points(512)
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diff**2).sum(-1)).max())

    # -- torus-level queries ---------------------------------------------

    @property
    def boundary_tolerance(self) -> float:
        return config.shapes.analytic_tolerance

    def local_contains(self, points: np.ndarray) -> np.ndarray:
        return self.local_signed_distance(points) > 0

    def local_depth(self, points: np.ndarray) -> np.ndarray:
        """Distance to the boundary for points already known to be inside."""
        return self.local_signed_distance(points)

    def _replace(self, **changes) -> "DampingShape":
        return type(self).model_validate({**self.model_dump(), **changes})

    def _lift(self, z: np.ndarray) -> np.ndarray:
        ref = self.reference_point()
        return ref + minimal_image(np.asarray(z, dtype=float) - ref)

    def _translates(self, z: np.ndarray):
        """Yield (lifted points, indices inside the bounding box) per lattice translate."""
        base = self._lift(z)
        box = self.bounding_box()
        for k in LATTICE_BLOCK:
            pts = base + k
            near = np.all((pts >= box[:2]) & (pts <= box[2:]), axis=1)
            yield pts, np.flatnonzero(near)

    def distance_to_complement(self, z) -> np.ndarray:
        """d(z) = dist(z, T^2 minus omega); 0 outside omega."""
        z = np.atleast_2d(np.asarray(z, dtype=float))
        out = np.zeros(len(z))
        for pts, idx in self._translates(z):
            if not idx.size:
                continue
            idx = idx[self.local_contains(pts[idx])]
            if idx.size:
                out[idx] = np.maximum(out[idx], self.local_depth(pts[idx]))
        return out

    def contains(self, z, tol: Optional[float] = None) -> np.ndarray:
        """Membership in the open set omega; points within tol of the boundary are out."""
        tol = self.boundary_tolerance if tol is None else tol
        z = np.atleast_2d(np.asarray(z, dtype=float))
        hit = np.zeros(len(z), dtype=bool)
        for pts, idx in self._translates(z):
            if idx.size:
                hit[idx[self.local_contains(pts[idx])]] = True
        if tol > 0 and hit.any():
            hit[hit] = self.distance_to_complement(z[hit]) > tol
        return hit

    def chords(self, p0, u, length: float) -> List[Chord]:
        """Inside intervals of the segment p0 + t*u on the torus (all translates)."""
        p0 = np.asarray(p0, dtype=float)
        u = np.asarray(u, dtype=float)
        p1 = p0 + length * u
        seg_lo = np.minimum(p0, p1)
        seg_hi = np.maximum(p0, p1)
        box = self.bounding_box()
        kx = range(math.floor(seg_lo[0] - box[2]), math.ceil(seg_hi[0] - box[0]) + 1)
        ky = range(math.floor(seg_lo[1] - box[3]), math.ceil(seg_hi[1] - box[1]) + 1)
        found: List[Chord] = []
        for i in kx:
            for j in ky:
                k = np.array([i, j], dtype=float)
                lo = box[:2] + k
                hi = box[2:] + k
                if np.any(seg_hi < lo) or np.any(seg_lo > hi):
                    continue
                found.extend(self.local_chords(p0 - k, u, length))
        return merge_chords(found)

    def line_hits(self, frame: DirectionFrame, s: float) -> bool:
        """Whether the closed geodesic at transverse offset s meets omega."""
        p0 = frame.to_plane(s, 0.0)
        return bool(self.chords(p0, frame.direction.unit, frame.t_circumference))

    def shadow_arcs(self, frame: DirectionFrame) -> List[Arc]:
        """Open arcs of the s-circle whose geodesics meet omega.

        The projection of a connected open lift onto perp is an open interval
        (hmin, hmax); every translate of a geodesic is offset by a multiple of
        1/T, so the shadow is that interval wrapped onto the s-circle.
        """
        hmin, hmax = self.support(frame.direction.perp)
        return [(float(np.mod(hmin, frame.s_circumference)), float(hmax - hmin))]

    def contacts_on_line(
        self, frame: DirectionFrame, s: float, tol: float
    ) -> List[Contact]:
        """Boundary points on the geodesic at offset s, for every lift level."""
        perp = frame.direction.perp
        c = frame.s_circumference
        hmin, hmax = self.support(perp)
        k_lo = math.floor((hmin - tol - s) / c)
        k_hi = math.ceil((hmax + tol - s) / c)
        found: List[Contact] = []
        for k in range(k_lo, k_hi + 1):
            level = s + k * c
            if hmin - tol <= level <= hmax + tol:
                found.extend(self.contacts(perp, level, tol))
        return found


def shadow_gaps(arcs: List[Arc], circumference: float, tol: float) -> List[Tuple[float, float]]:
    """Closed gaps [a, b] of the s-circle left uncovered by the open arcs.

    A gap of length <= tol is a single isolated line; an empty list means
    every geodesic of the family meets omega.
    """
    c = circumference
    if any(length >= c + tol for _, length in arcs):
        return []
    if not arcs:
        return [(0.0, c)]
    intervals = sorted((float(np.mod(a, c)), float(np.mod(a, c) + l)) for a, l in arcs)
    merged: List[List[float]] = []
    for a, b in intervals:
        if merged and a < merged[-1][1] - tol:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    # wrap-around overlap of the last arc onto the first ones
    while len(merged) > 1 and merged[-1][1] - c > merged[0][0] + tol:
        last = merged.pop()
        merged[0] = [last[0] - c, max(merged[0][1], last[1] - c)]
    gaps = []
    for i, (_, end) in enumerate(merged):
        nxt = merged[(i + 1) % len(merged)][0]
        if i == len(merged) - 1:
            nxt += c
        if nxt - end >= -tol:
            gaps.append((end, nxt))
    if len(merged) == 1 and merged[0][1] - merged[0][0] > c + tol:
        return []
    return gaps


Contact.model_rebuild()
