"""Genericity of polygonal damping: edge directions against candidate glancing directions."""

import math
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from app.config import GenericitySettings, config
from app.exceptions import DomainError
from app.genericity.candidates import CandidateDirectionSet
from app.geometry.polygon import Polygon
from app.geometry.shapes import proper_projection_check
from app.geometry.torus import RationalDirection
from app.logger import logger


class EdgeAlignment(BaseModel):
    edge: int
    direction: RationalDirection

    def __str__(self) -> str:
        return f"edge {self.edge} is parallel to {self.direction}"


class QMembership(BaseModel):
    """Whether no edge of the polygon is parallel to a candidate direction."""

    member: bool
    exact: bool
    candidates: CandidateDirectionSet
    witness: Optional[EdgeAlignment] = None
    alignments: List[EdgeAlignment] = Field(default_factory=list)


class ExceptionalAngle(BaseModel):
    theta: float
    edge: int
    direction: RationalDirection
    admissible: bool = True

    @property
    def reason(self) -> str:
        return f"edge {self.edge} rotated by {self.theta:.12g} is parallel to {self.direction}"


class RotationDiagnostics(BaseModel):
    """Rotation angles (mod pi) that put a boundary direction on a candidate direction."""

    shape_kind: str
    candidates: CandidateDirectionSet
    angles: List[ExceptionalAngle] = Field(default_factory=list)
    cover: List[Tuple[float, float]] = Field(
        default_factory=list, description="Outer cover of the exceptional set by closed intervals"
    )
    measure: float = 0.0
    measure_history: List[float] = Field(default_factory=list)
    converging: Optional[bool] = None
    notes: List[str] = Field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        if self.angles:
            return pd.DataFrame(
                {
                    "theta": [a.theta for a in self.angles],
                    "edge": [a.edge for a in self.angles],
                    "direction": [str(a.direction) for a in self.angles],
                    "admissible": [a.admissible for a in self.angles],
                }
            )
        return pd.DataFrame(
            {"start": [lo for lo, _ in self.cover], "end": [hi for _, hi in self.cover]}
        )


class PolygonMembership(BaseModel):
    """Q' condition plus an openness check under small vertex perturbations."""

    label: str
    in_q_prime: bool
    openness_trials: int
    openness_failures: int
    perturbation: float
    membership: QMembership


def _check_polygon(polygon: Polygon) -> None:
    if not proper_projection_check(polygon):
        raise DomainError("polygon overlaps its own translates and does not embed in the torus")


def _parallel_exact(edge: Tuple[Fraction, Fraction], v: RationalDirection) -> bool:
    dx, dy = edge
    return dx * v.q - dy * v.p == 0


def _parallel_float(edge: np.ndarray, v: RationalDirection, tol: float) -> bool:
    cross = edge[0] * v.q - edge[1] * v.p
    return abs(cross) <= tol * float(np.linalg.norm(edge)) * v.period


def polygon_in_Q(
    polygon: Polygon,
    candidates: Optional[CandidateDirectionSet] = None,
    settings: Optional[GenericitySettings] = None,
) -> QMembership:
    """True iff no edge is parallel (as an unoriented direction) to a candidate direction.

    Exact polygons compare integer cross products of the decimal edge vectors;
    others use the relative edge tolerance.
    """
    settings = settings or config.genericity
    _check_polygon(polygon)
    candidates = candidates or CandidateDirectionSet.for_shape(polygon)
    fractions = polygon.edge_fractions
    alignments: List[EdgeAlignment] = []
    for i, edge in enumerate(polygon.edge_vectors):
        for v in candidates.directions:
            if fractions is not None:
                hit = _parallel_exact(fractions[i], v)
            else:
                hit = _parallel_float(edge, v, settings.edge_tolerance)
            if hit:
                alignments.append(EdgeAlignment(edge=i, direction=v))
    return QMembership(
        member=not alignments,
        exact=fractions is not None,
        candidates=candidates,
        witness=alignments[0] if alignments else None,
        alignments=alignments,
    )


def polygon_exceptional_rotations(
    polygon: Polygon, candidates: Optional[CandidateDirectionSet] = None
) -> RotationDiagnostics:
    """Angles theta in [0, pi) with R_theta(edge) parallel to a candidate.

    Rotating by theta + pi gives the same alignments. Angles at which the
    rotated polygon no longer embeds are marked inadmissible.
    """
    _check_polygon(polygon)
    candidates = candidates or CandidateDirectionSet.for_shape(polygon)
    found: List[ExceptionalAngle] = []
    for i, edge in enumerate(polygon.edge_vectors):
        phi = math.atan2(edge[1], edge[0])
        for v, psi in zip(candidates.directions, candidates.angles):
            theta = (psi - phi) % math.pi
            if math.isclose(theta, math.pi, abs_tol=1e-13):
                theta = 0.0
            found.append(ExceptionalAngle(theta=theta, edge=i, direction=v))

    # merge coincident angles from parallel edges
    found.sort(key=lambda a: (a.theta, a.edge))
    unique: List[ExceptionalAngle] = []
    for angle in found:
        if unique and abs(angle.theta - unique[-1].theta) <= 1e-12:
            continue
        unique.append(angle)
    for angle in unique:
        angle.admissible = proper_projection_check(polygon.rotated(angle.theta))
    logger.info(
        f"Polygon with {len(polygon.edges)} edges: {len(unique)} exceptional rotations "
        f"against {len(candidates)} candidate directions"
    )
    return RotationDiagnostics(
        shape_kind=polygon.kind,
        candidates=candidates,
        angles=unique,
        notes=["angles are modulo pi"],
    )


def _perturbed(polygon: Polygon, rng: np.random.Generator, size: float) -> Polygon:
    vertices = polygon.vertices + rng.uniform(-size, size, polygon.vertices.shape)
    return Polygon.from_vertices(vertices.tolist(), exact=False)


def polygon_membership(
    polygon: Polygon,
    settings: Optional[GenericitySettings] = None,
    seed: Optional[int] = None,
) -> PolygonMembership:
    """Q' membership with an openness check.

    The polygon is labelled `Q` when it satisfies the condition and every
    random perturbation of its vertices does too, `Q' only` when it satisfies
    the condition but some perturbation fails, and `not Q'` otherwise.
    """
    settings = settings or config.genericity
    membership = polygon_in_Q(polygon, settings=settings)
    rng = np.random.default_rng(config.runtime.seed if seed is None else seed)
    failures = 0
    if membership.member:
        for _ in range(settings.openness_trials):
            moved = _perturbed(polygon, rng, settings.openness_perturbation)
            try:
                ok = polygon_in_Q(moved, membership.candidates, settings).member
            except DomainError:
                ok = False
            failures += not ok
    if not membership.member:
        label = "not Q'"
    elif failures:
        label = "Q' only"
    else:
        label = "Q"
    return PolygonMembership(
        label=label,
        in_q_prime=membership.member,
        openness_trials=settings.openness_trials if membership.member else 0,
        openness_failures=failures,
        perturbation=settings.openness_perturbation,
        membership=membership,
    )
