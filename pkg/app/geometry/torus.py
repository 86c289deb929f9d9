"""Rational directions, geodesic frames and distances on the flat torus R^2/Z^2."""

import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.exceptions import DomainError


# 3x3 block of lattice translates; relevant diameters are < 1 for properly projected sets
LATTICE_BLOCK = np.array(
    [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float
)


def reduce_mod1(points: np.ndarray) -> np.ndarray:
    """Reduce coordinates into the fundamental domain [0, 1)^2."""
    reduced = np.mod(points, 1.0)
    # np.mod may return 1.0 for tiny negative inputs
    reduced[reduced >= 1.0] = 0.0
    return reduced


def minimal_image(delta: np.ndarray) -> np.ndarray:
    """Shortest lattice representative of a displacement."""
    return delta - np.round(delta)


def torus_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Torus metric between broadcastable arrays of points (..., 2)."""
    delta = minimal_image(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    return np.hypot(delta[..., 0], delta[..., 1])


class TorusPoint(BaseModel):
    """A point of the torus with coordinates reduced mod 1."""

    model_config = ConfigDict(frozen=True)

    x: float = Field(..., description="Fundamental-domain x in [0, 1)")
    y: float = Field(..., description="Fundamental-domain y in [0, 1)")

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data):
        if isinstance(data, (list, tuple)):
            data = {"x": data[0], "y": data[1]}
        if isinstance(data, dict):
            x, y = reduce_mod1(np.array([data["x"], data["y"]], dtype=float))
            data = {**data, "x": float(x), "y": float(y)}
        return data

    @classmethod
    def from_array(cls, z) -> "TorusPoint":
        return cls(x=float(z[0]), y=float(z[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def distance(self, other: "TorusPoint") -> float:
        return float(torus_distance(self.as_array(), other.as_array()))


class RationalDirection(BaseModel):
    """A coprime lattice direction (p, q), canonical on the half circle."""

    model_config = ConfigDict(frozen=True)

    p: int
    q: int

    @model_validator(mode="after")
    def _check_canonical(self) -> "RationalDirection":
        if self.p == 0 and self.q == 0:
            raise ValueError("direction (0, 0) is not a direction")
        if math.gcd(abs(self.p), abs(self.q)) != 1:
            raise ValueError(f"({self.p}, {self.q}) is not coprime")
        if self.p < 0 or (self.p == 0 and self.q < 0):
            raise ValueError(f"({self.p}, {self.q}) is not the canonical representative")
        return self

    @classmethod
    def from_any(cls, p: int, q: int) -> "RationalDirection":
        """Canonical representative of the unoriented direction of (p, q)."""
        p, q = int(p), int(q)
        if p == 0 and q == 0:
            raise DomainError("direction (0, 0) is not a direction")
        g = math.gcd(abs(p), abs(q))
        p, q = p // g, q // g
        if p < 0 or (p == 0 and q < 0):
            p, q = -p, -q
        return cls(p=p, q=q)

    @classmethod
    def parse(cls, text: str) -> "RationalDirection":
        """Parse the CLI form ``p,q``."""
        try:
            p, q = (int(part) for part in text.split(","))
        except ValueError as e:
            raise DomainError(f"Cannot parse direction '{text}', expected p,q") from e
        return cls.from_any(p, q)

    @property
    def key(self) -> Tuple[int, int]:
        return (self.p, self.q)

    @property
    def period(self) -> float:
        return math.hypot(self.p, self.q)

    @property
    def period_squared(self) -> int:
        return self.p * self.p + self.q * self.q

    @property
    def unit(self) -> np.ndarray:
        return np.array([self.p, self.q], dtype=float) / self.period

    @property
    def perp(self) -> np.ndarray:
        return np.array([-self.q, self.p], dtype=float) / self.period

    @property
    def angle(self) -> float:
        return math.atan2(self.q, self.p)

    def __str__(self) -> str:
        return f"({self.p},{self.q})"


class DirectionFrame(BaseModel):
    """(s, t) coordinates z = s*perp + t*unit adapted to a rational direction."""

    model_config = ConfigDict(frozen=True)

    direction: RationalDirection

    @classmethod
    def of(cls, p: int, q: int) -> "DirectionFrame":
        return cls(direction=RationalDirection.from_any(p, q))

    @property
    def s_circumference(self) -> float:
        return 1.0 / self.direction.period

    @property
    def t_circumference(self) -> float:
        return self.direction.period

    def to_plane(self, s, t) -> np.ndarray:
        """Lift (s, t) to R^2 without reducing mod 1; broadcasts over arrays."""
        s = np.asarray(s, dtype=float)[..., None]
        t = np.asarray(t, dtype=float)[..., None]
        return s * self.direction.perp + t * self.direction.unit

    def to_torus(self, s, t) -> np.ndarray:
        return reduce_mod1(self.to_plane(s, t))

    def wrap_s(self, s):
        """Reduce transverse coordinates into [0, 1/T)."""
        return np.mod(s, self.s_circumference)

    def s_distance(self, s1, s2):
        """Distance on the transverse circle of circumference 1/T."""
        c = self.s_circumference
        delta = np.mod(np.asarray(s1) - np.asarray(s2), c)
        return np.minimum(delta, c - delta)

    def st_coordinates(self, z) -> Tuple[float, float]:
        """Inverse chart: the (s, t) of a torus point, s in [0, 1/T), t in [0, T).

        A lattice vector k shifts z.perp by (p*k2 - q*k1)/T; since gcd(p, q) = 1
        every multiple of 1/T is reached, so s is recovered mod 1/T and the
        matching k comes from the Bezout identity.
        """
        z = np.asarray(z, dtype=float)
        v = self.direction
        T = v.period
        raw = float(z @ v.perp)
        m = math.floor(raw * T + 1e-12)
        s = raw - m / T
        if s < 0:
            s = 0.0
        # solve p*k2 - q*k1 = m
        g, a, b = _extended_gcd(v.p, -v.q)
        k2, k1 = a * m, b * m
        t = float((z - np.array([k1, k2], dtype=float)) @ v.unit)
        return s, float(np.mod(t, T))


def _extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_x, x = x, old_x - quotient * x
        old_y, y = y, old_y - quotient * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def enumerate_candidate_directions(inradius: float) -> List[RationalDirection]:
    """Canonical coprime (p, q) with p^2 + q^2 <= 1/(4 inradius^2).

    Only these directions can carry glancing lines when omega contains a ball of
    the given radius: a family of parallel closed geodesics of period T is
    spaced 1/T apart, so one of them crosses the ball unless 1/T >= 2 inradius.
    """
    if not inradius > 0:
        raise DomainError(f"inradius must be positive, got {inradius}")
    if inradius > 0.5:
        raise DomainError(f"inradius must be at most 1/2, got {inradius}")

    bound = 1.0 / (4.0 * inradius * inradius)
    # integer bound; the relative slack keeps boundary cases p^2 + q^2 = bound
    n_max = math.floor(bound * (1.0 + 1e-12))
    radius = math.isqrt(n_max)

    directions = []
    for p in range(0, radius + 1):
        for q in range(-radius, radius + 1):
            if p == 0 and q <= 0:
                continue
            if p * p + q * q > n_max or math.gcd(p, abs(q)) != 1:
                continue
            directions.append(RationalDirection(p=p, q=q))
    directions.sort(key=lambda v: (v.period_squared, v.p, v.q))
    return directions


def transverse_step(v: RationalDirection) -> np.ndarray:
    """(-q, p)/T^2: maps every geodesic of direction v to itself."""
    return np.array([-v.q, v.p], dtype=float) / v.period_squared


def geodesic_sample(frame: DirectionFrame, s: float, n: int) -> List[TorusPoint]:
    """n equally spaced points along the closed geodesic at transverse offset s."""
    if n < 2:
        raise DomainError(f"need at least 2 samples, got {n}")
    t = np.arange(n) * (frame.t_circumference / n)
    points = frame.to_torus(np.full(n, s), t)
    return [TorusPoint.from_array(z) for z in points]
