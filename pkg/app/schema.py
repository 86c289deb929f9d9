from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from app.geometry.torus import DirectionFrame, RationalDirection, TorusPoint


SCHEMA_VERSION = "1.0"


class Sidedness(str, Enum):
    """Sidedness of a glancing line or point"""

    ONE_SIDED = "one_sided"
    TWO_SIDED = "two_sided"
    INDETERMINATE = "indeterminate"


class OrderStatus(str, Enum):
    """How the order of a glancing point was obtained"""

    PENDING = "pending"
    ANALYTIC = "analytic"
    FITTED = "fitted"
    NO_ORDER = "no_order"


CONTACT_VALUES = ("point", "vertex", "edge", "line")
CONTACT_TYPE = Literal[CONTACT_VALUES]  # type: ignore


class LocalChart(BaseModel):
    """Affine chart (s, t) -> (a(s - s0), b(s - s0) + c(t - t0)); the line maps to x = 0."""

    a: float
    b: float = 0.0
    c: float = 1.0
    origin: TorusPoint
    chart_radius: float

    @model_validator(mode="after")
    def _check_nondegenerate(self) -> "LocalChart":
        if self.a == 0.0 or self.c == 0.0:
            raise ValueError("chart coefficients a and c must be nonzero")
        return self

    def to_chart(self, ds, dt):
        """Chart coordinates of offsets (s - s0, t - t0)."""
        return self.a * ds, self.b * ds + self.c * dt

    def from_chart(self, x, y):
        ds = x / self.a
        return ds, (y - self.b * ds) / self.c


class GlancingPoint(BaseModel):
    """A boundary point of omega on a glancing line"""

    location: TorusPoint
    direction: RationalDirection
    s_offset: float
    contact: CONTACT_TYPE = "point"  # type: ignore
    sided: Sidedness = Sidedness.INDETERMINATE
    damped_side: Optional[int] = Field(
        default=None, description="+1 or -1: the s-side where omega lies, for one-sided points"
    )
    feature_size: float = 0.25
    order: Optional[float] = None
    order_status: OrderStatus = OrderStatus.PENDING
    chart: Optional[LocalChart] = None
    c_in: Optional[float] = None
    c_out: Optional[float] = None
    sandwich_verified: bool = False
    branch_orders: List[Optional[float]] = Field(default_factory=list)
    damping_exponent: Optional[float] = None
    side_exponents: Dict[int, float] = Field(
        default_factory=dict, description="Damping exponent on each damped s-side"
    )
    notes: List[str] = Field(default_factory=list)

    @property
    def has_order(self) -> bool:
        return self.order is not None

    @property
    def is_flat(self) -> bool:
        """A whole boundary segment lies on the line."""
        return self.contact in ("edge", "line")


class GlancingLine(BaseModel):
    """A closed geodesic missing omega and touching its boundary"""

    frame: DirectionFrame
    s_offset: float
    sided: Sidedness
    open_side: Optional[int] = Field(
        default=None, description="+1 or -1: the s-side whose nearby lines miss omega"
    )
    gap_width: float = Field(0.0, description="Width of the undamped band this line bounds")
    depth_agrees: bool = Field(
        True, description="m(s) vanishes on the line and is positive on each damped side"
    )
    touch_points: List[GlancingPoint] = Field(default_factory=list)

    @property
    def direction(self) -> RationalDirection:
        return self.frame.direction


class DirectionSummary(BaseModel):
    direction: RationalDirection
    lines: List[GlancingLine] = Field(default_factory=list)

    @property
    def one_sided_lines(self) -> List[GlancingLine]:
        return [line for line in self.lines if line.sided == Sidedness.ONE_SIDED]

    @property
    def two_sided_lines(self) -> List[GlancingLine]:
        return [line for line in self.lines if line.sided == Sidedness.TWO_SIDED]


class GlancingReport(BaseModel):
    """Glancing directions, lines and points of a damping field"""

    schema_version: str = SCHEMA_VERSION
    shape_id: str
    shape_kind: str
    inradius: float
    inradius_upper: float
    candidate_directions: List[RationalDirection]
    directions: List[DirectionSummary] = Field(default_factory=list)
    L1_empty: bool
    G_empty: bool
    orders_resolved: bool = True

    @property
    def lines(self) -> List[GlancingLine]:
        return [line for summary in self.directions for line in summary.lines]

    @property
    def points(self) -> List[GlancingPoint]:
        return [p for line in self.lines for p in line.touch_points]

    @property
    def glancing_directions(self) -> List[RationalDirection]:
        return [summary.direction for summary in self.directions if summary.lines]

    def lines_for(self, direction: RationalDirection) -> List[GlancingLine]:
        for summary in self.directions:
            if summary.direction == direction:
                return summary.lines
        return []

    def counts(self) -> Dict[str, int]:
        lines = self.lines
        return {
            "directions": 2 * len(self.glancing_directions),
            "lines": len(lines),
            "one_sided_lines": sum(line.sided == Sidedness.ONE_SIDED for line in lines),
            "two_sided_lines": sum(line.sided == Sidedness.TWO_SIDED for line in lines),
            "points": len(self.points),
        }
