"""Curved damping shapes bounded by a closed parametrized curve."""

import math
from abc import abstractmethod
from functools import cached_property
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import PositiveFloat, model_validator
from scipy.optimize import brentq

from app.config import config
from app.exceptions import DomainError
from app.geometry.base import (
    Chord,
    Contact,
    DampingShape,
    chords_from_crossings,
    golden_minimize,
)
from app.logger import logger


TWO_PI = 2.0 * math.pi
_CHUNK = 256
_CANDIDATES = 3
_AXIS_TAUS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def curvature_from_derivatives(d1, d2) -> np.ndarray:
    """sqrt(|g''|^2 |g'|^2 - (g''.g')^2) / |g'|^3, invariant under reparametrization."""
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    speed2 = (d1**2).sum(-1)
    if np.any(speed2 <= 1e-24):
        raise DomainError("curvature undefined: the parametrization has vanishing speed")
    cross2 = (d2**2).sum(-1) * speed2 - (d1 * d2).sum(-1) ** 2
    return np.sqrt(np.maximum(cross2, 0.0)) / speed2**1.5


def _bracketed_root(f, a: float, b: float) -> float:
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0 or fa * fb > 0:
        return b if abs(fb) <= abs(fa) else a
    return brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


class ParametricShape(DampingShape):
    """A lift bounded by gamma: [0, 2pi) -> R^2.

    Closest points come from dense boundary samples refined by golden-section
    search on both sides of the best local minima; chords come from bracketed
    roots of the signed offset along the boundary, with hidden tangencies
    between samples split at the refined extremum.
    """

    @abstractmethod
    def position(self, tau) -> np.ndarray:
        """Boundary point(s) gamma(tau), shape (..., 2)."""

    @abstractmethod
    def local_contains(self, points: np.ndarray) -> np.ndarray:
        """Strict interior test for the lift."""

    @abstractmethod
    def curvature_at(self, tau) -> np.ndarray:
        """Unsigned curvature at parameter(s) tau."""

    @abstractmethod
    def unit_tangent(self, tau) -> np.ndarray:
        """Unit tangent at parameter(s) tau."""

    @cached_property
    def _dense(self) -> Tuple[np.ndarray, np.ndarray]:
        count = config.shapes.boundary_samples
        taus = np.linspace(0.0, TWO_PI, count, endpoint=False)
        return taus, self.position(taus)

    @property
    def _step(self) -> float:
        return TWO_PI / len(self._dense[0])

    @property
    def sampling_error_bound(self) -> float:
        """Half the longest chord between consecutive dense samples."""
        _, pts = self._dense
        gaps = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        return 0.5 * float(gaps.max())

    def bounding_box(self) -> np.ndarray:
        _, pts = self._dense
        pad = self.sampling_error_bound
        return np.concatenate([pts.min(axis=0) - pad, pts.max(axis=0) + pad])

    def boundary_points(self, n: int) -> np.ndarray:
        return self.position(np.linspace(0.0, TWO_PI, n, endpoint=False))

    def closest_point(self, points, iterations: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Distance to the boundary and the parameter of the nearest boundary point."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        taus, samples = self._dense
        step = self._step
        iterations = config.shapes.golden_iterations if iterations is None else iterations
        fallbacks = 0
        n_cand = min(_CANDIDATES, len(taus) - 1)
        dist = np.empty(len(points))
        nearest = np.empty(len(points))

        for start in range(0, len(points), _CHUNK):
            chunk = points[start : start + _CHUNK]
            d2 = ((chunk[:, None, :] - samples[None, :, :]) ** 2).sum(-1)
            is_min = (d2 <= np.roll(d2, 1, axis=1)) & (d2 <= np.roll(d2, -1, axis=1))
            score = np.where(is_min, d2, np.inf)
            idx = np.argpartition(score, n_cand - 1, axis=1)[:, :n_cand]
            centre = taus[idx]
            lo = np.concatenate([centre - step, centre], axis=1)
            hi = np.concatenate([centre, centre + step], axis=1)
            target = chunk[:, None, :]

            def squared(t):
                return ((self.position(t) - target) ** 2).sum(-1)

            t_best, f_best = golden_minimize(squared, lo, hi, iterations)
            rows = np.arange(len(chunk))
            j = np.argmin(f_best, axis=1)
            refined, t_refined = f_best[rows, j], t_best[rows, j]
            k = np.argmin(d2, axis=1)
            sampled = d2[rows, k]
            use_sample = sampled < refined
            fallbacks += int(use_sample.sum())
            dist[start : start + len(chunk)] = np.sqrt(np.where(use_sample, sampled, refined))
            nearest[start : start + len(chunk)] = np.mod(
                np.where(use_sample, taus[k], t_refined), TWO_PI
            )
        if fallbacks:
            logger.debug(
                f"{self.kind}: {fallbacks} of {len(points)} closest points kept the dense sample "
                "over the golden-section refinement"
            )
        return dist, nearest

    def local_depth(self, points: np.ndarray) -> np.ndarray:
        return self.closest_point(points)[0]

    def local_signed_distance(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        depth = self.local_depth(points)
        return np.where(self.local_contains(points), depth, -depth)

    def support(self, w) -> Tuple[float, float]:
        w = np.asarray(w, dtype=float)
        taus, pts = self._dense
        g = pts @ w
        step = self._step
        lo_i, hi_i = int(np.argmin(g)), int(np.argmax(g))

        def refine(i: int, sign: float) -> float:
            lo = np.array([taus[i] - step, taus[i]])
            hi = np.array([taus[i], taus[i] + step])
            _, values = golden_minimize(
                lambda t: sign * (self.position(t) @ w), lo, hi, config.shapes.golden_iterations
            )
            return sign * float(values.min())

        return min(refine(lo_i, 1.0), float(g[lo_i])), max(refine(hi_i, -1.0), float(g[hi_i]))

    def contacts(self, w, level: float, tol: float) -> List[Contact]:
        w = np.asarray(w, dtype=float)
        taus, pts = self._dense
        g = pts @ w
        step = self._step
        prv, nxt = np.roll(g, 1), np.roll(g, -1)
        slack = np.abs(nxt - g) + np.abs(g - prv)
        found: List[Tuple[float, float]] = []
        for sign in (1.0, -1.0):
            sg = sign * g
            is_ext = (sg >= sign * prv) & (sg >= sign * nxt)
            cand = np.flatnonzero(is_ext & (np.abs(g - level) <= slack + tol))
            if not cand.size:
                continue
            centre = taus[cand]
            lo = np.concatenate([centre - step, centre])
            hi = np.concatenate([centre, centre + step])
            t_best, f_best = golden_minimize(
                lambda t: -sign * (self.position(t) @ w), lo, hi, config.shapes.golden_iterations
            )
            for t, f in zip(t_best, f_best):
                miss = abs(-sign * f - level)
                if miss <= tol:
                    found.append((float(np.mod(t, TWO_PI)), miss))

        kept: List[Tuple[float, float]] = []
        for t, miss in sorted(found):
            if kept and min(abs(t - kept[-1][0]), TWO_PI - abs(t - kept[-1][0])) < 2 * step:
                if miss < kept[-1][1]:
                    kept[-1] = (t, miss)
                continue
            kept.append((t, miss))
        if len(kept) > 1 and TWO_PI - kept[-1][0] + kept[0][0] < 2 * step:
            kept.pop()
        return [
            Contact(point=tuple(self.position(t)), owner=self, kind="point", param=t)
            for t, _ in kept
        ]

    def boundary_branches(self, contact: Contact, radii) -> List[np.ndarray]:
        tau0 = contact.param
        z0 = self.position(tau0)
        offsets = np.concatenate([[0.0], np.geomspace(1e-12, math.pi, 4096)])
        branches = []
        for sign in (1.0, -1.0):
            dist = np.linalg.norm(self.position(tau0 + sign * offsets) - z0, axis=-1)
            out = np.full((len(radii), 2), np.nan)
            for i, rho in enumerate(radii):
                hit = np.flatnonzero(dist >= rho)
                if not hit.size or hit[0] == 0:
                    continue
                j = hit[0]
                o = _bracketed_root(
                    lambda o: float(np.linalg.norm(self.position(tau0 + sign * o) - z0) - rho),
                    offsets[j - 1],
                    offsets[j],
                )
                out[i] = self.position(tau0 + sign * o)
            branches.append(out)
        return branches

    def local_chords(self, p0, u, length: float) -> List[Chord]:
        p0 = np.asarray(p0, dtype=float)
        u = np.asarray(u, dtype=float)
        normal = np.array([-u[1], u[0]])
        taus, pts = self._dense
        step = self._step
        iterations = config.shapes.golden_iterations
        h = (pts - p0) @ normal

        def offset(t) -> float:
            return float((self.position(t) - p0) @ normal)

        prv, nxt = np.roll(h, 1), np.roll(h, -1)
        roots = [
            _bracketed_root(offset, taus[i], taus[i] + step)
            for i in np.flatnonzero(np.sign(h) * np.sign(nxt) < 0)
        ]
        roots.extend(taus[h == 0.0])

        # tangencies that slip between two samples of the same sign
        is_min = (h > 0) & (h <= prv) & (h <= nxt)
        is_max = (h < 0) & (h >= prv) & (h >= nxt)
        near = np.abs(h) <= 2.0 * (np.abs(nxt - h) + np.abs(h - prv))
        for i in np.flatnonzero((is_min | is_max) & near):
            sign = 1.0 if h[i] > 0 else -1.0
            t_ext, f_ext = golden_minimize(
                lambda t: sign * ((self.position(t) - p0) @ normal),
                np.array([taus[i] - step]),
                np.array([taus[i] + step]),
                iterations,
            )
            if f_ext[0] < 0:
                roots.append(_bracketed_root(offset, taus[i] - step, float(t_ext[0])))
                roots.append(_bracketed_root(offset, float(t_ext[0]), taus[i] + step))

        if not roots:
            return []
        crossings = (self.position(np.array(roots)) - p0) @ u
        return chords_from_crossings(
            crossings, length, lambda t: self.local_contains(p0 + t[:, None] * u)
        )


class Disk(ParametricShape):
    """Round disk; every query has a closed form."""

    kind: Literal["disk"] = "disk"
    center: Tuple[float, float]
    radius: PositiveFloat

    def position(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)[..., None]
        return np.asarray(self.center) + self.radius * np.concatenate(
            [np.cos(tau), np.sin(tau)], axis=-1
        )

    def _offsets(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.linalg.norm(points - np.asarray(self.center), axis=1)

    def local_contains(self, points) -> np.ndarray:
        return self._offsets(points) < self.radius

    def local_depth(self, points) -> np.ndarray:
        return self.radius - self._offsets(points)

    def local_signed_distance(self, points) -> np.ndarray:
        return self.radius - self._offsets(points)

    def closest_point(self, points, iterations: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        delta = points - np.asarray(self.center)
        return (
            np.abs(self.radius - np.linalg.norm(delta, axis=1)),
            np.mod(np.arctan2(delta[:, 1], delta[:, 0]), TWO_PI),
        )

    def curvature_at(self, tau) -> np.ndarray:
        return np.full(np.shape(tau), 1.0 / self.radius)

    def unit_tangent(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)[..., None]
        return np.concatenate([-np.sin(tau), np.cos(tau)], axis=-1)

    def bounding_box(self) -> np.ndarray:
        cx, cy = self.center
        r = self.radius
        return np.array([cx - r, cy - r, cx + r, cy + r])

    def reference_point(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def exact_inradius(self) -> Optional[float]:
        return self.radius

    def diameter(self) -> float:
        return 2.0 * self.radius

    def support(self, w) -> Tuple[float, float]:
        w = np.asarray(w, dtype=float)
        mid = float(np.asarray(self.center) @ w)
        spread = self.radius * float(np.linalg.norm(w))
        return mid - spread, mid + spread

    def contacts(self, w, level: float, tol: float) -> List[Contact]:
        w = np.asarray(w, dtype=float)
        w_hat = w / np.linalg.norm(w)
        found = []
        for sign in (1.0, -1.0):
            point = np.asarray(self.center) + sign * self.radius * w_hat
            if abs(point @ w - level) <= tol:
                tau = math.atan2(sign * w_hat[1], sign * w_hat[0]) % TWO_PI
                found.append(Contact(point=tuple(point), owner=self, kind="point", param=tau))
        return found

    def boundary_branches(self, contact: Contact, radii) -> List[np.ndarray]:
        radii = np.asarray(radii, dtype=float)
        phi = 2.0 * np.arcsin(np.clip(radii / (2.0 * self.radius), 0.0, 1.0))
        phi = np.where(radii <= 2.0 * self.radius, phi, np.nan)
        return [self.position(contact.param + phi), self.position(contact.param - phi)]

    def local_chords(self, p0, u, length: float) -> List[Chord]:
        rel = np.asarray(p0, dtype=float) - np.asarray(self.center)
        u = np.asarray(u, dtype=float)
        half_b = float(rel @ u)
        disc = half_b * half_b - (float(rel @ rel) - self.radius**2)
        if disc <= 0.0:
            return []
        root = math.sqrt(disc)
        a, b = max(-half_b - root, 0.0), min(-half_b + root, length)
        return [(a, b)] if b > a else []

    def translated(self, offset) -> "Disk":
        cx, cy = self.center
        return self._replace(center=(cx + float(offset[0]), cy + float(offset[1])))

    def rotated(self, theta: float, about=None) -> "Disk":
        if about is None:
            return self
        about = np.asarray(about, dtype=float)
        centre = about + rotation_matrix(theta) @ (np.asarray(self.center) - about)
        return self._replace(center=tuple(centre))


class SuperEllipse(ParametricShape):
    """|x/a|^m + |y/b|^n < 1 in a frame rotated by `angle` around `center`."""

    kind: Literal["superellipse"] = "superellipse"
    center: Tuple[float, float]
    a: PositiveFloat
    b: PositiveFloat
    m: PositiveFloat
    n: PositiveFloat
    angle: float = 0.0

    @property
    def _rotation(self) -> np.ndarray:
        return rotation_matrix(self.angle)

    def to_local(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return (points - np.asarray(self.center)) @ self._rotation

    def position(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        c, s = np.cos(tau), np.sin(tau)
        local = np.stack(
            [
                self.a * np.sign(c) * np.abs(c) ** (2.0 / self.m),
                self.b * np.sign(s) * np.abs(s) ** (2.0 / self.n),
            ],
            axis=-1,
        )
        return np.asarray(self.center) + local @ self._rotation.T

    def level(self, points) -> np.ndarray:
        local = self.to_local(np.atleast_2d(points))
        return np.abs(local[:, 0] / self.a) ** self.m + np.abs(local[:, 1] / self.b) ** self.n

    def local_contains(self, points) -> np.ndarray:
        return self.level(points) < 1.0

    def _gradient_terms(self, tau):
        local = self.to_local(self.position(tau))
        x, y = local[..., 0], local[..., 1]
        a, b, m, n = self.a, self.b, self.m, self.n
        with np.errstate(divide="ignore", invalid="ignore"):
            fx = m * np.sign(x) * np.abs(x) ** (m - 1) / a**m
            fy = n * np.sign(y) * np.abs(y) ** (n - 1) / b**n
            fxx = m * (m - 1) * np.abs(x) ** (m - 2) / a**m
            fyy = n * (n - 1) * np.abs(y) ** (n - 2) / b**n
        return fx, fy, fxx, fyy

    def curvature_at(self, tau) -> np.ndarray:
        fx, fy, fxx, fyy = self._gradient_terms(tau)
        with np.errstate(divide="ignore", invalid="ignore"):
            kappa = np.abs(fy**2 * fxx + fx**2 * fyy) / (fx**2 + fy**2) ** 1.5
        return np.nan_to_num(kappa, nan=np.inf)

    def unit_tangent(self, tau) -> np.ndarray:
        fx, fy, _, _ = self._gradient_terms(tau)
        with np.errstate(invalid="ignore"):
            norm = np.hypot(fx, fy)
            local = np.stack([-fy / norm, fx / norm], axis=-1)
        return local @ self._rotation.T

    def contacts(self, w, level: float, tol: float) -> List[Contact]:
        # golden refinement stalls on flat tips; snap to the exact axis parameter
        w = np.asarray(w, dtype=float)
        snapped = []
        for contact in super().contacts(w, level, tol):
            for tip in _AXIS_TAUS:
                if _angle_gap(contact.param, tip) < 2 * self._step:
                    z = self.position(tip)
                    if abs(float(z @ w) - level) <= tol:
                        contact = Contact(point=tuple(z), owner=self, kind="point", param=tip)
                    break
            snapped.append(contact)
        return snapped

    @property
    def is_regular(self) -> bool:
        """Both exponents >= 2 give a C^2 boundary with nonvanishing tangent."""
        return min(self.m, self.n) >= 2.0

    def axis_order(self, tau: float, line_direction) -> Optional[float]:
        """Exact order at an axis tip touched by a line perpendicular to that axis."""
        v_local = np.asarray(line_direction, dtype=float) @ self._rotation
        on_x_axis = min(_angle_gap(tau, 0.0), _angle_gap(tau, math.pi)) < 1e-9
        on_y_axis = min(_angle_gap(tau, 0.5 * math.pi), _angle_gap(tau, 1.5 * math.pi)) < 1e-9
        if on_x_axis and abs(v_local[0]) < 1e-9:
            return self.n
        if on_y_axis and abs(v_local[1]) < 1e-9:
            return self.m
        return None

    def reference_point(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def translated(self, offset) -> "SuperEllipse":
        cx, cy = self.center
        return self._replace(center=(cx + float(offset[0]), cy + float(offset[1])))

    def rotated(self, theta: float, about=None) -> "SuperEllipse":
        centre = np.asarray(self.center, dtype=float)
        if about is not None:
            about = np.asarray(about, dtype=float)
            centre = about + rotation_matrix(theta) @ (centre - about)
        return self._replace(center=tuple(centre), angle=self.angle + theta)


class SmoothCurve(ParametricShape):
    """Fourier curve center + sum_k A_k cos(k tau) + B_k sin(k tau).

    Each harmonic is stored as (A_x, A_y, B_x, B_y). A dense table of boundary
    samples may be given instead under the key ``samples``.
    """

    kind: Literal["curve"] = "curve"
    center: Tuple[float, float] = (0.5, 0.5)
    harmonics: List[Tuple[float, float, float, float]]

    @model_validator(mode="before")
    @classmethod
    def _from_sample_table(cls, data):
        if isinstance(data, dict) and "samples" in data and "harmonics" not in data:
            centre, harmonics = _fourier_harmonics(
                np.asarray(data["samples"], dtype=float), data.get("max_harmonics", 64)
            )
            data = {k: v for k, v in data.items() if k not in ("samples", "max_harmonics")}
            data.update(center=tuple(centre), harmonics=harmonics)
        return data

    @model_validator(mode="after")
    def _check_regular(self) -> "SmoothCurve":
        if not self.harmonics:
            raise DomainError("a curve needs at least one harmonic")
        taus = np.linspace(0.0, TWO_PI, 1024, endpoint=False)
        d1, _ = self.derivatives(taus)
        if np.min(np.linalg.norm(d1, axis=-1)) <= 1e-12:
            raise DomainError("curve parametrization has vanishing speed")
        return self

    @classmethod
    def circle(cls, center, radius: float) -> "SmoothCurve":
        return cls(center=tuple(center), harmonics=[(radius, 0.0, 0.0, radius)])

    @classmethod
    def ellipse(cls, center, a: float, b: float, angle: float = 0.0) -> "SmoothCurve":
        rot = rotation_matrix(angle)
        ax, ay = rot @ np.array([a, 0.0])
        bx, by = rot @ np.array([0.0, b])
        return cls(center=tuple(center), harmonics=[(ax, ay, bx, by)])

    @classmethod
    def from_samples(cls, samples, max_harmonics: int = 64) -> "SmoothCurve":
        return cls(samples=np.asarray(samples).tolist(), max_harmonics=max_harmonics)

    @property
    def boundary_tolerance(self) -> float:
        return config.shapes.sampled_tolerance

    @cached_property
    def _coefficients(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        coeffs = np.asarray(self.harmonics, dtype=float)
        k = np.arange(1, len(coeffs) + 1, dtype=float)
        return k, coeffs[:, :2], coeffs[:, 2:]

    def position(self, tau) -> np.ndarray:
        k, a, b = self._coefficients
        phase = np.asarray(tau, dtype=float)[..., None] * k
        return np.asarray(self.center) + np.cos(phase) @ a + np.sin(phase) @ b

    def derivatives(self, tau) -> Tuple[np.ndarray, np.ndarray]:
        k, a, b = self._coefficients
        phase = np.asarray(tau, dtype=float)[..., None] * k
        c, s = np.cos(phase), np.sin(phase)
        d1 = (-s * k) @ a + (c * k) @ b
        d2 = (-c * k**2) @ a + (-s * k**2) @ b
        return d1, d2

    def curvature_at(self, tau) -> np.ndarray:
        return curvature_from_derivatives(*self.derivatives(tau))

    def unit_tangent(self, tau) -> np.ndarray:
        d1, _ = self.derivatives(tau)
        return d1 / np.linalg.norm(d1, axis=-1, keepdims=True)

    @cached_property
    def orientation(self) -> float:
        """+1 for counter-clockwise parametrizations."""
        _, pts = self._dense
        x, y = pts[:, 0], pts[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        return 1.0 if area > 0 else -1.0

    def local_contains(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        depth, tau = self.closest_point(points)
        d1, _ = self.derivatives(tau)
        inward = self.orientation * np.stack([-d1[:, 1], d1[:, 0]], axis=-1)
        side = ((points - self.position(tau)) * inward).sum(-1)
        return (side > 0) & (depth > 0)

    def local_signed_distance(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        depth, tau = self.closest_point(points)
        d1, _ = self.derivatives(tau)
        inward = self.orientation * np.stack([-d1[:, 1], d1[:, 0]], axis=-1)
        side = ((points - self.position(tau)) * inward).sum(-1)
        return np.where(side > 0, depth, -depth)

    def reference_point(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    def translated(self, offset) -> "SmoothCurve":
        cx, cy = self.center
        return self._replace(center=(cx + float(offset[0]), cy + float(offset[1])))

    def rotated(self, theta: float, about=None) -> "SmoothCurve":
        rot = rotation_matrix(theta)
        centre = np.asarray(self.center, dtype=float)
        if about is not None:
            about = np.asarray(about, dtype=float)
            centre = about + rot @ (centre - about)
        coeffs = np.asarray(self.harmonics, dtype=float)
        a = coeffs[:, :2] @ rot.T
        b = coeffs[:, 2:] @ rot.T
        harmonics = [tuple(row) for row in np.hstack([a, b])]
        return self._replace(center=tuple(centre), harmonics=harmonics)


def _angle_gap(a: float, b: float) -> float:
    gap = abs(a - b) % TWO_PI
    return min(gap, TWO_PI - gap)


def _fourier_harmonics(samples: np.ndarray, max_harmonics: int):
    """Real Fourier coefficients of a closed curve sampled uniformly in its parameter."""
    if samples.ndim != 2 or samples.shape[1] != 2 or len(samples) < 8:
        raise DomainError("curve samples must be an (M, 2) table with M >= 8")
    count = len(samples)
    spectrum = np.fft.rfft(samples, axis=0) / count
    top = min(max_harmonics, count // 2 - 1)
    harmonics = []
    for k in range(1, top + 1):
        a = 2.0 * spectrum[k].real
        b = -2.0 * spectrum[k].imag
        harmonics.append((float(a[0]), float(a[1]), float(b[0]), float(b[1])))
    # trailing harmonics at round-off level carry no geometry
    scale = max(np.abs(np.asarray(harmonics)).max(), 1e-300)
    while len(harmonics) > 1 and np.abs(np.asarray(harmonics[-1])).max() < 1e-14 * scale:
        harmonics.pop()
    return spectrum[0].real, harmonics
