"""Simple polygons given by their edge vectors and an anchor vertex."""

from fractions import Fraction
from functools import cached_property
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field, model_validator

from app.exceptions import DomainError
from app.geometry.base import Chord, Contact, DampingShape, chords_from_crossings
from app.geometry.curves import rotation_matrix
from app.geometry.torus import TorusPoint


def exact_decimal(value: float) -> Fraction:
    """Fraction of the shortest decimal that round-trips to value."""
    return Fraction(repr(float(value)))


class Polygon(DampingShape):
    """Polygon with vertices anchor, anchor + v1, anchor + v1 + v2, ...

    With ``exact`` set, edges are read as the decimals they print as, so edge
    directions can be compared with lattice directions in integer arithmetic.
    """

    kind: Literal["polygon"] = "polygon"
    edges: List[Tuple[float, float]]
    anchor: TorusPoint
    exact: bool = Field(True, description="Edges are exact decimals")

    @model_validator(mode="after")
    def _check_polygon(self) -> "Polygon":
        edges = np.asarray(self.edges, dtype=float)
        if len(edges) < 3:
            raise DomainError(f"a polygon needs at least 3 edges, got {len(edges)}")
        lengths = np.linalg.norm(edges, axis=1)
        if np.any(lengths == 0.0):
            raise DomainError("degenerate polygon: zero-length edge")
        if np.linalg.norm(edges.sum(axis=0)) > 1e-9 * lengths.sum():
            raise DomainError("polygon edges do not close: v1 + ... + vn != 0")
        _check_simple(self.vertices)
        return self

    @classmethod
    def from_vertices(cls, vertices: Sequence[Sequence[float]], exact: bool = True) -> "Polygon":
        if exact:
            fr = [(exact_decimal(x), exact_decimal(y)) for x, y in vertices]
            nxt = fr[1:] + fr[:1]
            edges = [(float(b[0] - a[0]), float(b[1] - a[1])) for a, b in zip(fr, nxt)]
        else:
            pts = np.asarray(vertices, dtype=float)
            edges = [tuple(e) for e in np.roll(pts, -1, axis=0) - pts]
        return cls(edges=edges, anchor=TorusPoint.from_array(vertices[0]), exact=exact)

    @classmethod
    def square(cls, center, side: float, angle: float = 0.0) -> "Polygon":
        half = 0.5 * side
        corners = np.array([[-half, -half], [half, -half], [half, half], [-half, half]])
        if angle:
            corners = corners @ rotation_matrix(angle).T
        corners = corners + np.asarray(center, dtype=float)
        return cls.from_vertices(corners.tolist(), exact=angle == 0.0)

    @cached_property
    def vertices(self) -> np.ndarray:
        edges = np.asarray(self.edges, dtype=float)
        offsets = np.vstack([[0.0, 0.0], np.cumsum(edges[:-1], axis=0)])
        return self.anchor.as_array() + offsets

    @cached_property
    def _edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=float)

    @property
    def edge_vectors(self) -> np.ndarray:
        return self._edge_array

    @property
    def edge_fractions(self) -> Optional[List[Tuple[Fraction, Fraction]]]:
        if not self.exact:
            return None
        return [(exact_decimal(dx), exact_decimal(dy)) for dx, dy in self.edges]

    @cached_property
    def orientation(self) -> float:
        v = self.vertices
        area = 0.5 * np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        return 1.0 if area > 0 else -1.0

    def local_contains(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        a = self.vertices
        b = np.roll(a, -1, axis=0)
        x, y = points[:, 0:1], points[:, 1:2]
        straddle = (a[:, 1] > y) != (b[:, 1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = a[:, 0] + (y - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
        crossings = np.count_nonzero(straddle & (x < x_cross), axis=1)
        inside = crossings % 2 == 1
        # boundary points are not in the open set
        return inside & (self._edge_distance(points) > 0)

    def _edge_distance(self, points: np.ndarray) -> np.ndarray:
        a = self.vertices
        d = self._edge_array
        w = points[:, None, :] - a[None, :, :]
        t = np.clip((w * d).sum(-1) / (d * d).sum(-1), 0.0, 1.0)
        return np.linalg.norm(w - t[..., None] * d, axis=-1).min(axis=1)

    def local_depth(self, points) -> np.ndarray:
        return self._edge_distance(np.atleast_2d(np.asarray(points, dtype=float)))

    def local_signed_distance(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        dist = self._edge_distance(points)
        return np.where(self.local_contains(points), dist, -dist)

    def local_chords(self, p0, u, length: float) -> List[Chord]:
        p0 = np.asarray(p0, dtype=float)
        u = np.asarray(u, dtype=float)
        a = self.vertices
        d = self._edge_array
        rel = a - p0
        denom = u[0] * d[:, 1] - u[1] * d[:, 0]
        ok = np.abs(denom) > 1e-15 * np.linalg.norm(d, axis=1)
        t = (rel[ok, 0] * d[ok, 1] - rel[ok, 1] * d[ok, 0]) / denom[ok]
        s = (rel[ok, 0] * u[1] - rel[ok, 1] * u[0]) / denom[ok]
        crossings = t[(s >= -1e-12) & (s <= 1.0 + 1e-12)]
        if not crossings.size:
            return []
        return chords_from_crossings(
            crossings, length, lambda tt: self.local_contains(p0 + tt[:, None] * u)
        )

    def support(self, w) -> Tuple[float, float]:
        g = self.vertices @ np.asarray(w, dtype=float)
        return float(g.min()), float(g.max())

    def bounding_box(self) -> np.ndarray:
        v = self.vertices
        return np.concatenate([v.min(axis=0), v.max(axis=0)])

    def boundary_points(self, n: int) -> np.ndarray:
        lengths = np.linalg.norm(self._edge_array, axis=1)
        counts = np.maximum(1, np.round(n * lengths / lengths.sum()).astype(int))
        pieces = [
            a + np.linspace(0.0, 1.0, c, endpoint=False)[:, None] * d
            for a, d, c in zip(self.vertices, self._edge_array, counts)
        ]
        return np.vstack(pieces)

    def feature_points(self) -> np.ndarray:
        return self.vertices

    def diameter(self) -> float:
        v = self.vertices
        return float(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1).max())

    def contacts(self, w, level: float, tol: float) -> List[Contact]:
        g = self.vertices @ np.asarray(w, dtype=float)
        on_line = np.abs(g - level) <= tol
        found = [
            Contact(point=tuple(self.vertices[i]), owner=self, kind="vertex", param=float(i))
            for i in np.flatnonzero(on_line)
        ]
        for i in np.flatnonzero(on_line & np.roll(on_line, -1)):
            mid = self.vertices[i] + 0.5 * self._edge_array[i]
            found.append(Contact(point=tuple(mid), owner=self, kind="edge", param=float(i)))
        return found

    def boundary_branches(self, contact: Contact, radii) -> List[np.ndarray]:
        radii = np.asarray(radii, dtype=float)[:, None]
        i = int(contact.param)
        d = self._edge_array
        z0 = contact.as_array()
        if contact.kind == "edge":
            e = d[i]
            reach = 0.5 * np.linalg.norm(e)
            e_hat = e / np.linalg.norm(e)
            ahead, behind = z0 + radii * e_hat, z0 - radii * e_hat
            limit = radii[:, 0] <= reach
            ahead[~limit] = np.nan
            behind[~limit] = np.nan
            return [ahead, behind]
        incoming, outgoing = d[i - 1], d[i]
        branches = []
        for edge, sign in ((outgoing, 1.0), (incoming, -1.0)):
            e_len = np.linalg.norm(edge)
            pts = z0 + sign * radii * (edge / e_len)
            pts[radii[:, 0] > e_len] = np.nan
            branches.append(pts)
        return branches

    def reference_point(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def translated(self, offset) -> "Polygon":
        anchor = self.anchor.as_array() + np.asarray(offset, dtype=float)
        return self._replace(anchor=anchor.tolist())

    def rotated(self, theta: float, about=None) -> "Polygon":
        rot = rotation_matrix(theta)
        about = self.reference_point() if about is None else np.asarray(about, dtype=float)
        anchor = about + rot @ (self.vertices[0] - about)
        edges = [tuple(e) for e in self._edge_array @ rot.T]
        return self._replace(edges=edges, anchor=anchor.tolist(), exact=False)


def _check_simple(vertices: np.ndarray) -> None:
    """Raise DomainError when two non-adjacent edges intersect."""
    n = len(vertices)
    a = vertices
    b = np.roll(vertices, -1, axis=0)

    def orient(p, q, r):
        return np.sign((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
                       - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))

    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            o1 = orient(a[i], b[i], a[j])
            o2 = orient(a[i], b[i], b[j])
            o3 = orient(a[j], b[j], a[i])
            o4 = orient(a[j], b[j], b[i])
            if o1 * o2 < 0 and o3 * o4 < 0:
                raise DomainError(f"self-intersecting polygon: edges {i} and {j} cross")
