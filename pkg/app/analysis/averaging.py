"""Directional averages A_v(W) along closed geodesics, their zero sets and vanishing exponents."""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from app.analysis.fitting import PowerLawFit, fit_power_law
from app.analysis.quadrature import integrate, integrate_batch
from app.config import AveragingSettings, config
from app.exceptions import AnalysisError, ConvergenceError, DomainError, InconsistencyError
from app.geometry.curves import Disk
from app.geometry.field import DampingField, WeightField
from app.geometry.polygon import Polygon
from app.geometry.shapes import Strip
from app.geometry.torus import DirectionFrame
from app.logger import logger
from app.schema import GlancingLine, GlancingReport, Sidedness


Component = Union[float, Tuple[float, float]]


class AveragedProfile(BaseModel):
    """A_v(W) sampled on a grid of the transverse circle."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    frame: DirectionFrame
    s_grid: np.ndarray
    values: np.ndarray
    quadrature_error: np.ndarray
    field: Optional[WeightField] = Field(default=None, exclude=True)

    @property
    def max_value(self) -> float:
        return float(self.values.max()) if len(self.values) else 0.0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"s": self.s_grid, "A_v": self.values, "quadrature_error": self.quadrature_error}
        )


class ZeroSetStructure(BaseModel):
    """Zero intervals [alpha, rho] and isolated zeros of a profile."""

    direction: str
    intervals: List[Tuple[float, float]] = Field(default_factory=list)
    points: List[float] = Field(default_factory=list)
    tolerance: float
    threshold: float

    @property
    def components(self) -> List[Component]:
        return [*self.intervals, *self.points]


class VanishingFit(BaseModel):
    """Exponent of A_v(W) ~ |s - edge|^exponent approaching a zero component from one side."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    direction: str
    edge: float
    side: int
    offsets: np.ndarray
    values: np.ndarray
    fit: PowerLawFit

    @property
    def exponent(self) -> float:
        return self.fit.exponent

    @property
    def interval(self) -> Tuple[float, float]:
        return self.fit.interval

    def summary(self) -> dict:
        return {
            "direction": self.direction,
            "edge": self.edge,
            "side": self.side,
            "exponent": self.exponent,
            "interval": list(self.interval),
            "max_deviation": self.fit.max_deviation,
            "window": list(self.fit.window),
            "local_slopes": self.fit.local_slopes,
        }


class FubiniCheck(BaseModel):
    direction: str
    averaged_mass: float
    reference_mass: float
    reference: str
    relative_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.relative_error <= self.tolerance


class LocalAverageBounds(BaseModel):
    """Empirical C0 with C0^-1 |ds|^e <= A_v(W) <= C0 |ds|^e near a glancing offset."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    exponent: float
    lower: float
    upper: float
    table: pd.DataFrame

    @property
    def constant(self) -> float:
        return max(self.upper, 1.0 / self.lower)


# -- averages ----------------------------------------------------------------


def _pieces(field: WeightField, frame: DirectionFrame, s: np.ndarray):
    """Integration pieces (lo, hi, owner) along each geodesic."""
    u = frame.direction.unit
    T = frame.t_circumference
    shape = field.shape
    lows, highs, owners = [], [], []
    if shape is None:
        # bilinear samples have kinks at every cell crossing
        n = field.values.shape[0]
        count = int(math.ceil(2 * n * T)) + 1
        cuts = np.linspace(0.0, T, count + 1)
        for i in range(len(s)):
            lows.extend(cuts[:-1])
            highs.extend(cuts[1:])
            owners.extend([i] * count)
        return lows, highs, owners
    for i, si in enumerate(s):
        for a, b in shape.chords(frame.to_plane(si, 0.0), u, T):
            lows.append(a)
            highs.append(b)
            owners.append(i)
    return lows, highs, owners


def average_along(
    field: WeightField,
    frame: DirectionFrame,
    s_grid=None,
    settings: Optional[AveragingSettings] = None,
) -> AveragedProfile:
    """A_v(W)(s) = (1/T) * integral of W over the closed geodesic at offset s.

    W vanishes off omega, so only the exact chords of omega are integrated,
    each by adaptive Gauss-Kronrod until the error estimate is below the
    relative tolerance.
    """
    settings = settings or config.averaging
    c = frame.s_circumference
    if s_grid is None:
        s_grid = np.linspace(0.0, c, settings.profile_points, endpoint=False)
    s = np.atleast_1d(np.asarray(s_grid, dtype=float))
    perp, u = frame.direction.perp, frame.direction.unit

    def integrand(ids: np.ndarray, t: np.ndarray) -> np.ndarray:
        return field.evaluate(s[ids, None] * perp + t[:, None] * u)

    lows, highs, owners = _pieces(field, frame, s)
    result = integrate_batch(
        integrand,
        lows,
        highs,
        owners,
        len(s),
        rtol=settings.relative_tolerance,
        max_rounds=settings.max_rounds,
        describe=lambda i: f"s={s[i]:.9g} on {frame.direction}",
    )
    T = frame.t_circumference
    logger.debug(
        f"Averaged {field.label} along {frame.direction}: {len(s)} offsets, "
        f"{result.rounds} refinement rounds"
    )
    return AveragedProfile(
        frame=frame,
        s_grid=s,
        values=np.maximum(result.values / T, 0.0),
        quadrature_error=result.errors / T,
        field=field,
    )


def average_direction(
    field: WeightField,
    frame: DirectionFrame,
    lines: Sequence[GlancingLine] = (),
    settings: Optional[AveragingSettings] = None,
) -> AveragedProfile:
    """Profile on the default uniform grid with the glancing offsets inserted."""
    settings = settings or config.averaging
    c = frame.s_circumference
    grid = np.linspace(0.0, c, settings.profile_points, endpoint=False)
    offsets = np.array([line.s_offset for line in lines], dtype=float)
    grid = np.unique(np.concatenate([grid, np.mod(offsets, c)]))
    return average_along(field, frame, grid, settings)


# -- zero sets -----------------------------------------------------------------

def _on_arc(x: float, a: float, b: float, c: float, tol: float) -> bool:
    """x lies on the arc from a to b (counter-clockwise) of a circle of circumference c."""
    return (x - a + tol) % c <= (b - a) % c + 2 * tol


def _zero_runs(zero: np.ndarray) -> List[Tuple[int, int]]:
    """Maximal circular runs (first, last) of True samples; zero must not be all True."""
    n = len(zero)
    start = int(np.argmin(zero))
    idx = np.roll(np.arange(n), -start)
    runs: List[Tuple[int, int]] = []
    i = 0
    while i < n:
        if zero[idx[i]]:
            j = i
            while j + 1 < n and zero[idx[j + 1]]:
                j += 1
            runs.append((int(idx[i]), int(idx[j])))
            i = j + 1
        else:
            i += 1
    return runs


def zero_set(
    profile: AveragedProfile,
    lines: Union[GlancingReport, Sequence[GlancingLine]],
    settings: Optional[AveragingSettings] = None,
    tolerance: Optional[float] = None,
) -> ZeroSetStructure:
    """Connected components of {A_v(W) <= zero_tol}, snapped to glancing lines.

    Each sampled run is matched with the glancing lines inside it (one grid
    cell of slack on each side). A one-sided line opening upward followed by
    one opening downward bounds a zero interval; any other line in the run
    is an isolated zero. Runs narrower than 3 cells never form intervals
    unless such a pair bounds them. A run with no glancing line in it is an
    inconsistency between the average and the geometry.
    """
    settings = settings or config.averaging
    frame = profile.frame
    direction = frame.direction
    if isinstance(lines, GlancingReport):
        lines = lines.lines_for(direction)
    lines = list(lines)
    c = frame.s_circumference
    tol = config.glancing.s_tolerance if tolerance is None else tolerance
    if profile.max_value <= 0.0:
        raise AnalysisError(f"A_v(W) vanishes identically along {direction}")
    threshold = settings.zero_tolerance * profile.max_value

    order = np.argsort(np.mod(profile.s_grid, c))
    s = np.mod(profile.s_grid, c)[order]
    zero = profile.values[order] <= threshold
    n = len(s)
    structure = ZeroSetStructure(direction=str(direction), tolerance=tol, threshold=threshold)
    if not zero.any():
        return structure

    for first, last in _zero_runs(zero):
        before, after = s[(first - 1) % n], s[(last + 1) % n]
        inside = sorted(
            (line for line in lines if _on_arc(line.s_offset, before, after, c, tol)),
            key=lambda line: (line.s_offset - before) % c,
        )
        if not inside:
            raise InconsistencyError(
                f"A_v(W) along {direction} vanishes on [{s[first]:.9g}, {s[last]:.9g}] "
                "but no glancing line lies there; refine the s-grid or the line search"
            )
        opening = None
        for line in inside:
            if line.sided == Sidedness.ONE_SIDED and line.open_side == 1:
                opening = line.s_offset
            elif line.sided == Sidedness.ONE_SIDED and line.open_side == -1:
                if opening is None:
                    raise InconsistencyError(
                        f"zero band along {direction} closes at s={line.s_offset:.9g} "
                        "without an opening glancing line"
                    )
                structure.intervals.append((opening, line.s_offset))
                opening = None
            else:
                structure.points.append(line.s_offset)
        if opening is not None:
            raise InconsistencyError(
                f"zero band along {direction} opening at s={opening:.9g} has no closing line"
            )

    one_sided = [line for line in lines if line.sided == Sidedness.ONE_SIDED]
    if structure.intervals and not one_sided:
        raise InconsistencyError(
            f"A_v(W) vanishes on intervals along {direction} without one-sided glancing lines"
        )
    if one_sided and not structure.intervals:
        logger.warning(
            f"One-sided glancing lines along {direction} but no sampled zero band; "
            "include the line offsets in the s-grid"
        )
    structure.intervals.sort()
    structure.points = sorted(set(structure.points))
    return structure


# -- vanishing exponents -------------------------------------------------------


def _edge_of(component: Component, side: int) -> float:
    if side not in (1, -1):
        raise DomainError(f"side must be +1 or -1, got {side}")
    if isinstance(component, (tuple, list)):
        alpha, rho = component
        return rho if side == 1 else alpha
    return float(component)


def _start_offset(profile: AveragedProfile, edge: float, side: int) -> float:
    """Largest offset that stays clear of the next zero of the profile on that side."""
    c = profile.frame.s_circumference
    ahead = np.mod(side * (profile.s_grid - edge), c)
    zeros = ahead[(profile.values <= 0.0) & (ahead > 1e-9 * c)]
    room = float(zeros.min()) if zeros.size else c
    return min(0.05 * c, 0.25 * room)


def fit_vanishing_exponent(
    profile: AveragedProfile,
    component: Component,
    side: int,
    settings: Optional[AveragingSettings] = None,
    start: Optional[float] = None,
) -> VanishingFit:
    """Slope of log A_v against log dist(s, component) on a dyadic grid beside one edge."""
    settings = settings or config.averaging
    if profile.field is None:
        raise DomainError("profile carries no field to refine near the component")
    frame = profile.frame
    edge = _edge_of(component, side)
    h0 = _start_offset(profile, edge, side) if start is None else start
    offsets = h0 * 2.0 ** -np.arange(settings.fit_scales)
    refined = average_along(profile.field, frame, edge + side * offsets, settings)
    fit = fit_power_law(offsets, refined.values, tolerance=settings.fit_window)
    if not fit.stable:
        slopes = ", ".join(f"{x:.3f}" for x in fit.local_slopes)
        raise ConvergenceError(
            f"no stabilizing window near s={edge:.9g} ({frame.direction}, side {side:+d}); "
            f"local slopes: {slopes}"
        )
    logger.info(
        f"Vanishing exponent at s={edge:.6g} ({frame.direction}, side {side:+d}): "
        f"{fit.exponent:.4f} +/- {fit.max_deviation:.4f}"
    )
    return VanishingFit(
        direction=str(frame.direction),
        edge=edge,
        side=side,
        offsets=offsets,
        values=refined.values,
        fit=fit,
    )


def fit_zero_set(
    profile: AveragedProfile,
    zeros: ZeroSetStructure,
    settings: Optional[AveragingSettings] = None,
) -> List[VanishingFit]:
    """Fits on the outer side of every interval edge and on both sides of every isolated zero."""
    fits = []
    for alpha, rho in zeros.intervals:
        fits.append(fit_vanishing_exponent(profile, (alpha, rho), -1, settings))
        fits.append(fit_vanishing_exponent(profile, (alpha, rho), 1, settings))
    for point in zeros.points:
        for side in (-1, 1):
            fits.append(fit_vanishing_exponent(profile, point, side, settings))
    return fits


def local_average_bounds(
    profile: AveragedProfile,
    s0: float,
    side: int,
    eta: float,
    beta: float,
    offsets: Optional[Sequence[float]] = None,
) -> LocalAverageBounds:
    """Tabulate A_v(W)(s0 + side*ds) against |ds|^(beta/min(eta, 1) + 1/eta)."""
    if profile.field is None:
        raise DomainError("profile carries no field to evaluate")
    if not eta > 0 or not beta > 0:
        raise DomainError("eta and beta must be positive")
    exponent = beta / min(eta, 1.0) + 1.0 / eta
    if offsets is None:
        offsets = _start_offset(profile, s0, side) * 2.0 ** -np.arange(config.averaging.fit_scales)
    offsets = np.asarray(offsets, dtype=float)
    values = average_along(profile.field, profile.frame, s0 + side * offsets).values
    model = offsets**exponent
    ratio = values / model
    table = pd.DataFrame({"offset": offsets, "A_v": values, "model": model, "ratio": ratio})
    return LocalAverageBounds(
        exponent=exponent, lower=float(ratio.min()), upper=float(ratio.max()), table=table
    )


# -- mass checks ---------------------------------------------------------------


def exact_mass(field: WeightField) -> Optional[float]:
    """Closed-form integral of W over the torus, when one is known."""
    if not isinstance(field, DampingField) or field.overrides or field.support_cutoff:
        return None
    shape, beta, amp = field.shape, field.beta, field.amplitude
    indicator = field.profile == "indicator"
    if isinstance(shape, Disk):
        r = shape.radius
        if indicator:
            return amp * math.pi * r * r
        return amp * 2.0 * math.pi * r ** (beta + 2) / ((beta + 1) * (beta + 2))
    if isinstance(shape, Strip):
        w = shape.width
        if indicator:
            return amp * w
        n = math.hypot(*shape.normal)
        return amp * 2.0 * (0.5 * w) ** (beta + 1) / ((beta + 1) * n**beta)
    if isinstance(shape, Polygon) and indicator:
        v = shape.vertices
        area = 0.5 * abs(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))
        return amp * area
    return None


def profile_mass(
    field: WeightField, frame: DirectionFrame, settings: Optional[AveragingSettings] = None
) -> float:
    """T * integral of A_v(W) over the s-circle, adaptive in s."""
    settings = settings or config.averaging
    c = frame.s_circumference
    breaks: List[float] = []
    if field.shape is not None:
        for start, length in field.shape.shadow_arcs(frame):
            if length < c:
                breaks.extend([np.mod(start, c), np.mod(start + length, c)])

    def profile(s: np.ndarray) -> np.ndarray:
        return average_along(field, frame, s, settings).values

    value, _ = integrate(
        profile, 0.0, c, rtol=1e-10, breakpoints=breaks, max_rounds=settings.max_rounds
    )
    return frame.t_circumference * value


def fubini_check(
    field: WeightField,
    frame: DirectionFrame,
    tolerance: float = 1e-8,
    settings: Optional[AveragingSettings] = None,
) -> FubiniCheck:
    """Compare T * (integral of A_v over s) with the mass of W.

    The reference is the closed form when known, otherwise the same mass
    computed through the horizontal (or vertical) family.
    """
    averaged = profile_mass(field, frame, settings)
    reference = exact_mass(field)
    kind = "closed_form"
    if reference is None:
        other = DirectionFrame.of(0, 1) if frame.direction.key == (1, 0) else DirectionFrame.of(1, 0)
        reference = profile_mass(field, other, settings)
        kind = f"direction {other.direction}"
    error = abs(averaged - reference) / max(abs(reference), 1e-300)
    if error > tolerance:
        logger.warning(
            f"Mass along {frame.direction} is {averaged:.12g}, reference {reference:.12g} "
            f"(relative error {error:.2e})"
        )
    return FubiniCheck(
        direction=str(frame.direction),
        averaged_mass=averaged,
        reference_mass=reference,
        reference=kind,
        relative_error=error,
        tolerance=tolerance,
    )
