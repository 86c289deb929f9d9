"""Genericity of smooth damping boundaries: curvature against candidate tangent directions."""

import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.optimize import minimize_scalar

from app.config import GenericitySettings, config
from app.exceptions import DomainError
from app.genericity.candidates import CandidateDirectionSet
from app.genericity.polygon import RotationDiagnostics
from app.geometry.curves import TWO_PI, ParametricShape
from app.logger import logger


# f below this counts as a zero of f_gamma
ZERO_TOLERANCE = 1e-10


class CurveMembership(BaseModel):
    """Grid evidence for f_gamma > 0 on the whole boundary."""

    status: str
    member: Optional[bool]
    min_f: float
    argmin: float
    lower_bound: float
    samples: int
    suggestion: Optional[str] = None


def _require_curve(curve) -> ParametricShape:
    if not isinstance(curve, ParametricShape):
        raise DomainError(f"curve genericity needs a smooth boundary, not '{curve.kind}'")
    return curve


def _tangents(curve: ParametricShape, t: np.ndarray) -> np.ndarray:
    tangent = np.asarray(curve.unit_tangent(t), dtype=float)
    if not np.all(np.isfinite(tangent)):
        raise DomainError("curve has vanishing speed; its unit tangent is undefined")
    return tangent


def curve_f_gamma(curve, t, candidates: CandidateDirectionSet) -> np.ndarray:
    """kappa(t) + prod over candidates v and signs of |T(t) -+ v/|v||."""
    curve = _require_curve(curve)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tangent = _tangents(curve, t)
    product = np.ones(len(t))
    for v in candidates.directions:
        u = v.unit
        product *= np.linalg.norm(tangent - u, axis=-1) * np.linalg.norm(tangent + u, axis=-1)
    return np.asarray(curve.curvature_at(t), dtype=float) + product


def _cell_lower_bounds(values: np.ndarray, step: float) -> Tuple[np.ndarray, float]:
    """Lower bounds on each periodic cell from the sampled Lipschitz constant."""
    ahead = np.roll(values, -1)
    lipschitz = float(np.max(np.abs(ahead - values))) / step
    return 0.5 * (values + ahead) - 0.5 * lipschitz * step, lipschitz


def curve_in_Y(
    curve,
    candidates: Optional[CandidateDirectionSet] = None,
    settings: Optional[GenericitySettings] = None,
) -> CurveMembership:
    """Decide f_gamma > 0 on a grid refined up to max_refinements times.

    A refined sample at or below ZERO_TOLERANCE decides non-membership; cell
    lower bounds from the sampled Lipschitz constant that are all positive
    decide membership. Otherwise the result is indeterminate.
    """
    settings = settings or config.genericity
    curve = _require_curve(curve)
    candidates = candidates or CandidateDirectionSet.for_shape(curve)
    for level in range(settings.max_refinements + 1):
        count = settings.curve_samples * 2**level
        step = TWO_PI / count
        t = np.arange(count) * step
        values = curve_f_gamma(curve, t, candidates)
        i = int(np.argmin(values))
        result = minimize_scalar(
            lambda x: float(curve_f_gamma(curve, x, candidates)[0]),
            bounds=(t[i] - step, t[i] + step),
            method="bounded",
            options={"xatol": 1e-14},
        )
        min_f, argmin = float(values[i]), float(t[i])
        if result.fun < min_f:
            min_f, argmin = float(result.fun), float(result.x) % TWO_PI
        lower, _ = _cell_lower_bounds(values, step)
        lower_bound = float(lower.min())
        if min_f <= ZERO_TOLERANCE:
            return CurveMembership(
                status="not_in_Y", member=False, min_f=min_f, argmin=argmin,
                lower_bound=lower_bound, samples=count,
            )
        if lower_bound > 0:
            return CurveMembership(
                status="in_Y", member=True, min_f=min_f, argmin=argmin,
                lower_bound=lower_bound, samples=count,
            )
        logger.debug(f"f_gamma certification inconclusive at {count} samples (min {min_f:.3g})")
    logger.warning(f"f_gamma stays near zero ({min_f:.3g} at t={argmin:.6g}) but no zero was found")
    return CurveMembership(
        status="indeterminate",
        member=None,
        min_f=min_f,
        argmin=argmin,
        lower_bound=lower_bound,
        samples=count,
        suggestion="raise genericity.curve_samples or genericity.max_refinements",
    )


def _merge_mod(intervals: List[Tuple[float, float]], period: float) -> List[Tuple[float, float]]:
    """Union of closed arcs [a, b] (b - a < period) on a circle, split at 0."""
    pieces: List[Tuple[float, float]] = []
    for a, b in intervals:
        a0 = a % period
        b0 = a0 + (b - a)
        if b0 > period:
            pieces.extend([(a0, period), (0.0, b0 - period)])
        else:
            pieces.append((a0, b0))
    pieces.sort()
    merged: List[List[float]] = []
    for a, b in pieces:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def _critical_cover(
    curve: ParametricShape, count: int, candidates: CandidateDirectionSet
) -> List[Tuple[float, float]]:
    step = TWO_PI / count
    t = np.arange(count) * step
    kappa = np.asarray(curve.curvature_at(t), dtype=float)
    lower, _ = _cell_lower_bounds(kappa, step)
    cells = np.flatnonzero(lower <= 0.0)
    if not len(cells):
        return []
    tangent = _tangents(curve, t)
    phi = np.mod(np.arctan2(tangent[:, 1], tangent[:, 0]), math.pi)
    arcs = []
    for j in cells:
        a, b = phi[j], phi[(j + 1) % count]
        delta = (b - a + 0.5 * math.pi) % math.pi - 0.5 * math.pi
        lo, hi = (a, a + delta) if delta >= 0 else (a + delta, a)
        for psi in candidates.angles:
            arcs.append((psi - hi, psi - lo))
    return _merge_mod(arcs, math.pi)


def curve_exceptional_rotation_set(
    curve,
    samples: Optional[int] = None,
    candidates: Optional[CandidateDirectionSet] = None,
    settings: Optional[GenericitySettings] = None,
) -> RotationDiagnostics:
    """Outer cover (mod pi) of the rotations that align a zero-curvature tangent with a candidate.

    Cells of the parameter circle where the curvature may vanish are mapped
    to arcs of tangent angles, and every arc is rotated onto every
    candidate. The cover is recomputed on successively doubled grids; a
    shrinking measure is evidence, not proof, that the exceptional set is null.
    """
    settings = settings or config.genericity
    curve = _require_curve(curve)
    candidates = candidates or CandidateDirectionSet.for_shape(curve)
    base = samples or settings.curve_samples
    history: List[float] = []
    cover: List[Tuple[float, float]] = []
    for level in range(settings.max_refinements):
        cover = _critical_cover(curve, base * 2**level, candidates)
        history.append(float(sum(b - a for a, b in cover)))
    converging = all(b <= a * (1 + 1e-12) for a, b in zip(history, history[1:]))
    if history and history[-1] > 0 and not converging:
        logger.warning(f"exceptional rotation cover does not shrink under refinement: {history}")
    return RotationDiagnostics(
        shape_kind=curve.kind,
        candidates=candidates,
        cover=cover,
        measure=history[-1] if history else 0.0,
        measure_history=history,
        converging=converging,
        notes=["angles are modulo pi"],
    )
