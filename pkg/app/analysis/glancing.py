"""Glancing lines and glancing points of a damping set, and the order of each point.

Lines come from the shadow of omega on the transverse circle of each candidate
direction: the open shadow arcs cover exactly the geodesics meeting omega, so
every endpoint of an uncovered gap is a glancing line. A gap that shrinks to a
single offset is a line touched from both sides.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from app.config import AppConfig, GlancingSettings, config
from app.exceptions import AnalysisError, DomainError
from app.geometry.base import Contact, DampingShape, shadow_gaps
from app.geometry.curves import Disk, ParametricShape, SuperEllipse
from app.geometry.field import DampingField, WeightField
from app.geometry.polygon import Polygon
from app.geometry.shapes import inradius, proper_projection_check
from app.geometry.torus import (
    DirectionFrame,
    RationalDirection,
    TorusPoint,
    enumerate_candidate_directions,
    torus_distance,
)
from app.logger import logger
from app.schema import (
    DirectionSummary,
    GlancingLine,
    GlancingPoint,
    GlancingReport,
    LocalChart,
    OrderStatus,
    Sidedness,
)


FEATURE_CAP = 0.25
_PRECISION_FLOOR = 1e-13
_SANDWICH_RATIOS = np.geomspace(1e-3, 1e3, 61)


class OrderEstimate(BaseModel):
    """Order of a glancing point with its chart and sandwich constants"""

    order: Optional[float] = None
    status: OrderStatus = OrderStatus.NO_ORDER
    chart: LocalChart
    c_in: Optional[float] = None
    c_out: Optional[float] = None
    sandwich_verified: bool = False
    branch_orders: List[Optional[float]] = Field(default_factory=list)
    slopes: List[List[float]] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


def _shape_of(source: Union[DampingShape, WeightField]) -> DampingShape:
    if isinstance(source, WeightField):
        if source.shape is None:
            raise DomainError("glancing analysis needs a shape; raw-sample fields carry none")
        return source.shape
    return source


# -- lines -------------------------------------------------------------------


def line_depth(shape: DampingShape, frame: DirectionFrame, s: float, samples: int = 32) -> float:
    """m(s): the largest distance to the complement along the geodesic at offset s."""
    u = frame.direction.unit
    p0 = frame.to_plane(s, 0.0)
    chords = shape.chords(p0, u, frame.t_circumference)
    if not chords:
        return 0.0
    ts = np.concatenate([np.linspace(a, b, samples + 2)[1:-1] for a, b in chords])
    return float(shape.distance_to_complement(p0 + ts[:, None] * u).max())


def scan_line_depth(shape: DampingShape, frame: DirectionFrame, s_grid) -> np.ndarray:
    """m(s) on a grid of transverse offsets."""
    return np.array([line_depth(shape, frame, float(s)) for s in np.asarray(s_grid)])


def _cross_check(shape: DampingShape, frame: DirectionFrame, arcs, gaps, resolution: float) -> None:
    """Compare the shadow with direct chord tests and flag under-resolved features."""
    c = frame.s_circumference
    narrow = [length for _, length in arcs if 0 < length < 10 * resolution]
    narrow += [b - a for a, b in gaps if resolution > b - a > 1e-12]
    if narrow:
        logger.warning(
            f"Direction {frame.direction}: features of width {min(narrow):.3g} are below "
            f"10x the scan spacing {resolution:.3g}; refine glancing.s_resolution"
        )
    for a, b in gaps:
        if b - a > 2 * resolution and shape.line_hits(frame, 0.5 * (a + b)):
            logger.warning(f"Direction {frame.direction}: line at s={0.5 * (a + b):.6g} in a gap meets omega")
    for start, length in arcs:
        if 2 * resolution < length < c and not shape.line_hits(frame, start + 0.5 * length):
            logger.warning(f"Direction {frame.direction}: shadow arc at s={start:.6g} has a missing line")


def _side_offset(line: GlancingLine, settings: GlancingSettings) -> float:
    base = 10.0 * settings.s_resolution * line.frame.s_circumference
    if line.gap_width > settings.s_tolerance:
        base = min(base, 0.25 * line.gap_width)
    return base


def depth_check(
    shape: DampingShape, line: GlancingLine, settings: Optional[GlancingSettings] = None
) -> bool:
    """m(s0) <= miss_tolerance and m(s0 + d) > miss_tolerance on every damped side."""
    settings = settings or config.glancing
    frame = line.frame
    delta = _side_offset(line, settings)
    s0 = line.s_offset
    here, plus, minus = scan_line_depth(shape, frame, [s0, s0 + delta, s0 - delta])
    tol = settings.miss_tolerance
    damped = {1: plus > tol, -1: minus > tol}
    if line.sided == Sidedness.TWO_SIDED:
        expected = {1: True, -1: True}
    elif line.sided == Sidedness.ONE_SIDED and line.open_side is not None:
        expected = {line.open_side: False, -line.open_side: True}
    else:
        expected = damped
    agrees = here <= tol and damped == expected
    if not agrees:
        logger.warning(
            f"Direction {frame.direction}, s={s0:.9g}: m(s) = {here:.3g}, "
            f"m(s+{delta:.3g}) = {plus:.3g}, m(s-{delta:.3g}) = {minus:.3g} "
            f"disagree with a {line.sided.value} line"
        )
    return bool(agrees)


def classify_line(
    shape: DampingShape, line: GlancingLine, settings: Optional[GlancingSettings] = None
) -> Sidedness:
    """One-sided when every nearby parallel line on some side misses omega."""
    settings = settings or config.glancing
    frame = line.frame
    offsets = _side_offset(line, settings) * 2.0 ** -np.arange(4)
    misses = {
        side: not any(shape.line_hits(frame, line.s_offset + side * d) for d in offsets)
        for side in (1, -1)
    }
    if misses[1] and misses[-1]:
        return Sidedness.INDETERMINATE
    if misses[1] or misses[-1]:
        return Sidedness.ONE_SIDED
    return Sidedness.TWO_SIDED


def find_glancing_lines(
    shape: Union[DampingShape, WeightField],
    v: RationalDirection,
    s_resolution: Optional[float] = None,
    settings: Optional[GlancingSettings] = None,
) -> List[GlancingLine]:
    """Glancing lines of direction v, sorted by transverse offset."""
    shape = _shape_of(shape)
    settings = settings or config.glancing
    res = settings.s_resolution if s_resolution is None else s_resolution
    if res > 1e-3:
        logger.warning(
            f"s resolution {res:g} is coarser than 1e-3 of the transverse circle; "
            "pass --tol glancing.s_resolution=1e-3 or smaller"
        )
    frame = DirectionFrame(direction=v)
    c = frame.s_circumference
    tol = settings.s_tolerance
    arcs = shape.shadow_arcs(frame)
    gaps = shadow_gaps(arcs, c, tol)
    _cross_check(shape, frame, arcs, gaps, res * c)

    candidates: List[Tuple[float, Sidedness, Optional[int], float]] = []
    for a, b in gaps:
        width = b - a
        if width <= tol:
            candidates.append((0.5 * (a + b), Sidedness.TWO_SIDED, None, 0.0))
        else:
            candidates.append((a, Sidedness.ONE_SIDED, 1, width))
            candidates.append((b, Sidedness.ONE_SIDED, -1, width))

    lines: List[GlancingLine] = []
    for s, sided, open_side, width in candidates:
        s = float(frame.wrap_s(s))
        if any(frame.s_distance(s, line.s_offset) <= tol for line in lines):
            continue
        if not shape.contacts_on_line(frame, s, settings.touch_tolerance):
            logger.debug(f"Direction {v}: gap end s={s:.9g} has no boundary contact")
            continue
        line = GlancingLine(
            frame=frame, s_offset=s, sided=sided, open_side=open_side, gap_width=width
        )
        checked = classify_line(shape, line, settings)
        if checked != sided:
            logger.warning(
                f"Direction {v}, s={s:.9g}: shadow says {sided.value}, "
                f"nearby lines say {checked.value}"
            )
        line = line.model_copy(update={"sided": checked})
        lines.append(line.model_copy(update={"depth_agrees": depth_check(shape, line, settings)}))
    return sorted(lines, key=lambda line: line.s_offset)


# -- points ------------------------------------------------------------------


def _unique_contacts(contacts: Sequence[Contact]) -> List[Contact]:
    kept: List[Contact] = []
    for contact in contacts:
        z = contact.as_array()
        if all(torus_distance(z, other.as_array()) > 1e-9 for other in kept):
            kept.append(contact)
    return kept


def _feature_size(shape: DampingShape, z: np.ndarray, others: Sequence[np.ndarray]) -> float:
    """Distance to the nearest other glancing point or vertex, capped."""
    sizes = [FEATURE_CAP]
    diameter = shape.diameter()
    if math.isfinite(diameter):
        sizes.append(0.25 * diameter)
    feats = shape.feature_points()
    if len(feats):
        d = torus_distance(feats, z)
        d = d[d > 1e-9]
        if d.size:
            sizes.append(float(d.min()))
    for other in others:
        d = float(torus_distance(other, z))
        if d > 1e-9:
            sizes.append(d)
    return min(sizes)


def classify_point(
    shape: DampingShape, frame: DirectionFrame, z: np.ndarray, feature_size: float
) -> Tuple[Sidedness, Optional[int]]:
    """Localized sidedness of a boundary point on a glancing line.

    Parallel segments of half-length r through z offset by r*10^-k are tested
    for chords of omega on each side, for r = feature/4 and feature/8.
    """
    u, perp = frame.direction.unit, frame.direction.perp
    verdicts = []
    for window in (0.25 * feature_size, 0.125 * feature_size):
        deltas = window * 10.0 ** -np.arange(1, 5)
        hits = {
            side: any(
                bool(shape.chords(z + side * d * perp - window * u, u, 2.0 * window))
                for d in deltas
            )
            for side in (1, -1)
        }
        verdicts.append((hits[1], hits[-1]))
    if verdicts[0] != verdicts[1]:
        return Sidedness.INDETERMINATE, None
    plus, minus = verdicts[0]
    if plus and minus:
        return Sidedness.TWO_SIDED, None
    if plus or minus:
        return Sidedness.ONE_SIDED, 1 if plus else -1
    return Sidedness.INDETERMINATE, None


def find_glancing_points(
    shape: Union[DampingShape, WeightField],
    line: GlancingLine,
    settings: Optional[GlancingSettings] = None,
) -> List[GlancingPoint]:
    """Boundary points of omega on a glancing line, each with its local sidedness."""
    shape = _shape_of(shape)
    settings = settings or config.glancing
    frame = line.frame
    contacts = _unique_contacts(
        shape.contacts_on_line(frame, line.s_offset, settings.touch_tolerance)
    )
    positions = [c.as_array() for c in contacts]
    points = []
    for contact, z in zip(contacts, positions):
        feature = _feature_size(shape, z, positions)
        sided, side = classify_point(shape, frame, z, feature)
        if sided == Sidedness.INDETERMINATE:
            logger.warning(f"Point {tuple(np.round(z, 6))} on {frame.direction}: sidedness unstable")
        points.append(
            GlancingPoint(
                location=TorusPoint.from_array(z),
                direction=frame.direction,
                s_offset=line.s_offset,
                contact=contact.kind,
                sided=sided,
                damped_side=side,
                feature_size=feature,
            )
        )
    return points


# -- orders ------------------------------------------------------------------


def _resolve_contact(
    shape: DampingShape, frame: DirectionFrame, point: GlancingPoint, tol: float
) -> Contact:
    contacts = shape.contacts_on_line(frame, point.s_offset, tol)
    if not contacts:
        raise AnalysisError(f"no boundary contact on the line through {point.location}")
    target = point.location.as_array()
    dist = [float(torus_distance(c.as_array(), target)) for c in contacts]
    i = int(np.argmin(dist))
    if dist[i] > 1e-6:
        raise AnalysisError(f"glancing point {point.location} is not on its line")
    return contacts[i]


def _analytic_order(contact: Contact, frame: DirectionFrame) -> Optional[float]:
    """Exact orders: transverse polygon vertices, positive curvature, superellipse tips."""
    owner = contact.owner
    u, perp = frame.direction.unit, frame.direction.perp
    if contact.kind == "vertex" and isinstance(owner, Polygon):
        edges = owner.edge_vectors
        i = int(contact.param)
        outgoing, incoming = edges[i], -edges[i - 1]
        rise_out = outgoing @ perp / np.linalg.norm(outgoing)
        rise_in = incoming @ perp / np.linalg.norm(incoming)
        if min(abs(rise_out), abs(rise_in)) > 1e-12 and rise_out * rise_in > 0:
            return 1.0
        return None
    if isinstance(owner, Disk):
        return 2.0
    if isinstance(owner, SuperEllipse):
        tip = owner.axis_order(contact.param, u)
        if tip is not None:
            return float(tip)
    if isinstance(owner, ParametricShape):
        kappa = float(owner.curvature_at(contact.param))
        if math.isfinite(kappa) and kappa * owner.diameter() > 1e-6:
            return 2.0
    return None


def _branch_order(x: np.ndarray, y: np.ndarray, tol: float) -> Tuple[Optional[float], List[float]]:
    """Order from log|x| against log|y|, taking the finest 3 stable local slopes."""
    keep = np.isfinite(x) & np.isfinite(y) & (x > _PRECISION_FLOOR) & (y > _PRECISION_FLOOR)
    lx, ly = np.log(x[keep]), np.log(y[keep])
    if lx.size < 4:
        return None, []
    with np.errstate(divide="ignore", invalid="ignore"):
        slopes = np.diff(lx) / np.diff(ly)
    slopes = slopes[np.isfinite(slopes)]
    for end in range(len(slopes), 2, -1):
        window = slopes[end - 3 : end]
        if np.ptp(window) <= tol:
            return float(window.mean()), slopes.tolist()
    return None, slopes.tolist()


def _shear(branches: List[Tuple[np.ndarray, np.ndarray]], radii: np.ndarray) -> float:
    """Slope dt/ds removed from the chart when both branches leave along one ray."""
    ends = []
    for ds, dt in branches:
        ok = np.flatnonzero(np.isfinite(ds) & (np.hypot(ds, dt) > _PRECISION_FLOOR))
        if not ok.size:
            return 0.0
        j = ok[-1]
        ends.append(np.array([ds[j], dt[j]]) / radii[j])
    if len(ends) != 2:
        return 0.0
    (s1, t1), (s2, t2) = ends
    if min(abs(s1), abs(s2)) < 0.05 or abs(s1 * t2 - s2 * t1) > 0.05 or s1 * s2 + t1 * t2 < 0:
        return 0.0
    return 0.5 * (t1 / s1 + t2 / s2)


def _longest_run(mask: np.ndarray) -> Optional[Tuple[int, int]]:
    best, start = None, None
    for i, flag in enumerate(np.append(mask, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if best is None or i - 1 - start > best[1] - best[0]:
                best = (start, i - 1)
            start = None
    return best if best is not None and best[1] > best[0] else None


def _fit_sandwich(
    shape: DampingShape,
    frame: DirectionFrame,
    z0: np.ndarray,
    eta: float,
    point: GlancingPoint,
    shear: float,
    chart_radius: float,
    branches: List[Tuple[np.ndarray, np.ndarray]],
):
    """Chart normalization and constants C_out > C_in > 1 of the order sandwich.

    The fat wedge {C_in^-1 |y|^eta <= |x| <= C_in |y|^eta} is located by strict
    membership tests along rays x = q |y|^eta; points beyond the chart radius
    are outside the chart and not tested.
    """
    u, perp = frame.direction.unit, frame.direction.perp
    ys = chart_radius * 2.0 ** -np.arange(6)

    def quadrant(sx: int, sy: int) -> np.ndarray:
        y = sy * ys[:, None]
        ds = sx * _SANDWICH_RATIOS[None, :] * ys[:, None] ** eta
        dt = y + shear * ds
        pts = z0 + ds[..., None] * perp + dt[..., None] * u
        inside = shape.contains(pts.reshape(-1, 2), tol=0.0).reshape(ds.shape)
        return np.all(inside | (np.abs(ds) > chart_radius), axis=0)

    if point.sided == Sidedness.ONE_SIDED:
        side = point.damped_side or 1
        patterns = [((side, 1),), ((side, -1),)]
    else:
        side = 1
        patterns = [
            ((1, 1), (-1, 1)),
            ((1, -1), (-1, -1)),
            ((1, 1), (-1, -1)),
            ((1, -1), (-1, 1)),
        ]
    cache: Dict[Tuple[int, int], np.ndarray] = {}
    best = None
    for pattern in patterns:
        mask = np.ones(len(_SANDWICH_RATIOS), dtype=bool)
        for quad in pattern:
            if quad not in cache:
                cache[quad] = quadrant(*quad)
            mask &= cache[quad]
        run = _longest_run(mask)
        if run and (best is None or run[1] - run[0] > best[0][1] - best[0][0]):
            best = (run, pattern[0][1])
    if best is None:
        return LocalChart(a=float(side), origin=point.location, chart_radius=chart_radius), None, None

    (i, j), sy = best
    q1, q2 = _SANDWICH_RATIOS[i], _SANDWICH_RATIOS[j]
    scale = 1.0 / math.sqrt(q1 * q2)
    c_in = (q2 / q1) ** 0.25
    chart = LocalChart(
        a=side * scale, b=-sy * shear, c=float(sy), origin=point.location, chart_radius=chart_radius
    )
    ratios = []
    for ds, dt in branches:
        y = np.abs(dt - shear * ds)
        ok = np.isfinite(ds) & (y > _PRECISION_FLOOR) & (np.abs(ds) > _PRECISION_FLOOR)
        ratios.extend(scale * np.abs(ds[ok]) / y[ok] ** eta)
    if not ratios:
        return chart, c_in, None
    c_out = max(1.05 / min(ratios), 2.0 * c_in)
    return chart, c_in, c_out


def estimate_order(
    source: Union[DampingShape, WeightField],
    point: GlancingPoint,
    settings: Optional[GlancingSettings] = None,
) -> OrderEstimate:
    """Order of a glancing point.

    Transverse polygon vertices have order 1 and positive-curvature tangencies
    order 2; superellipse axis tips carry their exponent. Otherwise boundary
    points at dyadic distances from the contact are fitted in the (s, t) chart,
    sheared when both boundary branches leave along one ray, and an order is
    accepted only when both branches stabilize on the same slope.
    """
    shape = _shape_of(source)
    settings = settings or config.glancing
    frame = DirectionFrame(direction=point.direction)
    contact = _resolve_contact(shape, frame, point, settings.touch_tolerance)
    chart_radius = settings.chart_scale * point.feature_size
    side = float(point.damped_side or 1)
    if contact.kind in ("edge", "line"):
        return OrderEstimate(
            chart=LocalChart(a=side, origin=point.location, chart_radius=chart_radius),
            notes=["a boundary segment lies on the line"],
        )

    u, perp = frame.direction.unit, frame.direction.perp
    z0 = contact.as_array()
    radii = 0.1 * point.feature_size * 2.0 ** -np.arange(settings.order_scales)
    raw = contact.owner.boundary_branches(contact, radii)
    if all(np.isnan(pts).all() for pts in raw):
        raise AnalysisError(f"no boundary samples in the chart around {point.location}")
    branches = [((pts - z0) @ perp, (pts - z0) @ u) for pts in raw]
    shear = _shear(branches, radii)

    tol = settings.order_slope_tolerance
    fitted, slopes = [], []
    for ds, dt in branches:
        eta, branch_slopes = _branch_order(np.abs(ds), np.abs(dt - shear * ds), tol)
        fitted.append(eta)
        slopes.append(branch_slopes)

    notes: List[str] = []
    analytic = _analytic_order(contact, frame)
    if analytic is not None:
        order, status = analytic, OrderStatus.ANALYTIC
        if any(f is not None and abs(f - analytic) > 2 * tol for f in fitted):
            notes.append(f"fitted branch orders {fitted} differ from the exact order {analytic}")
    elif fitted and all(f is not None for f in fitted) and np.ptp(fitted) <= 2 * tol:
        order, status = float(np.mean(fitted)), OrderStatus.FITTED
    else:
        order, status = None, OrderStatus.NO_ORDER
        notes.append(f"branch orders {fitted} did not settle on a common slope")

    if order is None:
        return OrderEstimate(
            chart=LocalChart(a=side, origin=point.location, chart_radius=chart_radius),
            branch_orders=fitted,
            slopes=slopes,
            notes=notes,
        )
    chart, c_in, c_out = _fit_sandwich(
        shape, frame, z0, order, point, shear, chart_radius, branches
    )
    if c_in is None or c_out is None:
        notes.append("no sandwich constants found inside the chart")
    return OrderEstimate(
        order=order,
        status=status,
        chart=chart,
        c_in=c_in,
        c_out=c_out,
        sandwich_verified=c_in is not None and c_out is not None,
        branch_orders=fitted,
        slopes=slopes,
        notes=notes,
    )


# -- report ------------------------------------------------------------------


def side_exponents(field: DampingField, point: GlancingPoint, offset: float) -> Dict[int, float]:
    """Damping exponent just off the point on each side where omega lies."""
    if point.sided == Sidedness.TWO_SIDED:
        sides = (1, -1)
    elif point.damped_side is not None:
        sides = (point.damped_side,)
    else:
        return {}
    z = point.location.as_array()
    perp = point.direction.perp
    return {side: float(field.exponent_at(z + side * offset * perp)[0]) for side in sides}


def _with_order(
    point: GlancingPoint,
    estimate: OrderEstimate,
    exponent: Optional[float],
    sides: Dict[int, float],
) -> GlancingPoint:
    return point.model_copy(
        update={
            "order": estimate.order,
            "order_status": estimate.status,
            "chart": estimate.chart,
            "c_in": estimate.c_in,
            "c_out": estimate.c_out,
            "sandwich_verified": estimate.sandwich_verified,
            "branch_orders": estimate.branch_orders,
            "damping_exponent": exponent,
            "side_exponents": sides,
            "notes": point.notes + estimate.notes,
        }
    )


def glancing_report(
    field: Union[WeightField, DampingShape],
    settings: Optional[AppConfig] = None,
    shape_id: Optional[str] = None,
) -> GlancingReport:
    """Candidate directions, glancing lines, glancing points and their orders."""
    app = settings or config.app
    glancing = app.glancing
    shape = _shape_of(field)
    if not proper_projection_check(shape):
        raise DomainError("shape is not properly projected onto the torus")

    estimate = inradius(shape)
    candidates = enumerate_candidate_directions(min(estimate.lower, 0.5))
    logger.info(
        f"Inradius {estimate.lower:.6g} (upper {estimate.upper:.6g}): "
        f"{len(candidates)} candidate directions"
    )

    def analyze(direction: RationalDirection) -> DirectionSummary:
        lines = find_glancing_lines(shape, direction, settings=glancing)
        return DirectionSummary(
            direction=direction,
            lines=[
                line.model_copy(update={"touch_points": find_glancing_points(shape, line, glancing)})
                for line in lines
            ],
        )

    with ThreadPoolExecutor(max_workers=app.runtime.threads) as pool:
        summaries = list(pool.map(analyze, candidates))

    located = [p.location.as_array() for s in summaries for line in s.lines for p in line.touch_points]

    def resolve(point: GlancingPoint) -> GlancingPoint:
        z = point.location.as_array()
        feature = min(point.feature_size, _feature_size(shape, z, located))
        point = point.model_copy(update={"feature_size": feature})
        try:
            order = estimate_order(shape, point, glancing)
        except AnalysisError as e:
            logger.warning(f"Order of {point.location} on {point.direction}: {e.message}")
            order = OrderEstimate(
                chart=LocalChart(
                    a=float(point.damped_side or 1),
                    origin=point.location,
                    chart_radius=glancing.chart_scale * feature,
                ),
                notes=[e.message],
            )
        if isinstance(field, DampingField):
            exponent = field.exponent_near(point.location)
            sides = side_exponents(field, point, glancing.chart_scale * feature)
        else:
            exponent, sides = None, {}
        return _with_order(point, order, exponent, sides)

    with ThreadPoolExecutor(max_workers=app.runtime.threads) as pool:
        resolved = []
        for summary in summaries:
            lines = []
            for line in summary.lines:
                points = list(pool.map(resolve, line.touch_points))
                lines.append(line.model_copy(update={"touch_points": points}))
            resolved.append(summary.model_copy(update={"lines": lines}))

    all_lines = [line for s in resolved for line in s.lines]
    all_points = [p for line in all_lines for p in line.touch_points]
    unresolved = [p for p in all_points if not p.has_order and not p.is_flat]
    if unresolved:
        logger.warning(f"{len(unresolved)} glancing points have no resolved order")

    report = GlancingReport(
        shape_id=shape_id or getattr(field, "label", shape.kind),
        shape_kind=shape.kind,
        inradius=estimate.lower,
        inradius_upper=estimate.upper,
        candidate_directions=candidates,
        directions=resolved,
        L1_empty=not any(line.sided == Sidedness.ONE_SIDED for line in all_lines),
        G_empty=not all_lines,
        orders_resolved=not unresolved,
    )
    counts = report.counts()
    logger.info(
        f"{report.shape_id}: {counts['directions']} glancing directions, "
        f"{counts['lines']} lines ({counts['one_sided_lines']} one-sided), "
        f"{counts['points']} points"
    )
    return report
