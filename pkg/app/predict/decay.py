"""Energy-decay exponents from glancing orders and damping exponents."""

import math
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, Field

from app.exceptions import DomainError
from app.geometry.field import DampingField, WeightField
from app.logger import logger
from app.schema import GlancingLine, GlancingPoint, GlancingReport, OrderStatus, Sidedness


# exponents below this are outside the damping class the rates are proved for
MIN_DAMPING_EXPONENT = 9.0

# representative glancing order of each bundled case; None means flat contact
CASE_ORDERS: Dict[str, Optional[float]] = {"A": None, "B": 2.0, "C": 1.0}


class DecayRegime(str, Enum):
    GCC_EXPONENTIAL = "gcc_exponential"
    ONE_SIDED = "one_sided_regime"
    TWO_SIDED_ONLY = "two_sided_only_regime"


def exponent_transform(beta: float, eta: float) -> float:
    """Vanishing exponent of A_v(W) at a glancing point of order eta: beta/min(eta, 1) + 1/eta."""
    if not beta > 0 or not eta > 0:
        raise DomainError(f"beta and eta must be positive, got beta={beta}, eta={eta}")
    return beta / min(eta, 1.0) + 1.0 / eta


def one_sided_alpha(beta_prime: float) -> float:
    return 1.0 - 1.0 / (beta_prime + 3.0)


def two_sided_alpha(gamma_prime: float) -> float:
    return 1.0 + 2.0 / gamma_prime


def alpha_for_order(beta: float, eta: Optional[float]) -> float:
    """alpha of a field whose one-sided glancing points all have order eta.

    eta=None is a flat contact and keeps beta unimproved. As eta -> 0+ the
    transformed exponent grows without bound and alpha increases towards 1.
    """
    exponent = beta if eta is None else exponent_transform(beta, eta)
    return one_sided_alpha(exponent)


class PointExponent(BaseModel):
    location: Tuple[float, float]
    line_sided: Sidedness
    beta: float
    order: Optional[float]
    exponent: float
    side: Optional[int] = None
    fallback: bool = False


class DirectionExponents(BaseModel):
    """beta_v over points on one-sided lines, gamma_v over points on two-sided lines."""

    direction: str
    beta_v: Optional[float] = None
    gamma_v: Optional[float] = None
    points: List[PointExponent] = Field(default_factory=list)
    degraded: bool = False


class DecayPrediction(BaseModel):
    regime: DecayRegime
    alpha: Optional[float] = Field(
        None, description="Polynomial decay exponent; None for exponential decay"
    )
    beta_prime: Optional[float] = None
    gamma_prime: Optional[float] = None
    directions: List[DirectionExponents] = Field(default_factory=list)
    degraded: bool = False
    warnings: List[str] = Field(default_factory=list)

    @property
    def rate(self) -> str:
        if self.regime == DecayRegime.GCC_EXPONENTIAL:
            return "exponential"
        return f"t^(-1/{self.alpha:.6g})"


def _point_exponent(
    point: GlancingPoint, line_sided: Sidedness, beta: float, side: Optional[int] = None
) -> PointExponent:
    resolved = point.order is not None and point.order_status != OrderStatus.NO_ORDER
    if resolved:
        exponent = exponent_transform(beta, point.order)
    else:
        exponent = beta
    return PointExponent(
        location=(point.location.x, point.location.y),
        line_sided=line_sided,
        beta=beta,
        order=point.order if resolved else None,
        exponent=exponent,
        side=side,
        fallback=not resolved,
    )


def _side_betas(
    point: GlancingPoint, line: GlancingLine, default_beta: Optional[float]
) -> List[Tuple[Optional[int], float]]:
    """Damping exponents entering the rate: the damped side of a one-sided line, every side otherwise."""
    sides = point.side_exponents
    if sides:
        if line.sided == Sidedness.ONE_SIDED and line.open_side is not None and -line.open_side in sides:
            return [(-line.open_side, sides[-line.open_side])]
        return sorted(sides.items())
    beta = point.damping_exponent if point.damping_exponent is not None else default_beta
    if beta is None:
        raise DomainError(f"no damping exponent for the glancing point at {point.location}")
    return [(None, beta)]


def predict(report: GlancingReport, field: Optional[WeightField] = None) -> DecayPrediction:
    """Decay exponent alpha from a glancing report.

    With one-sided glancing lines alpha = 1 - 1/(beta' + 3), beta' the
    minimum over directions of beta_v; otherwise, when only two-sided lines
    exist, alpha = 1 + 2/gamma' with gamma' the maximum gamma_v. Two-sided
    points of a direction that also has one-sided lines are recorded but do
    not enter the rate. Points without an order keep the unimproved exponent
    and mark the prediction degraded.
    """
    default_beta = field.beta if isinstance(field, DampingField) else None
    warnings: List[str] = []
    directions: List[DirectionExponents] = []

    for summary in report.directions:
        if not summary.lines:
            continue
        entry = DirectionExponents(direction=str(summary.direction))
        one_sided, two_sided = [], []
        for line in summary.lines:
            if line.sided == Sidedness.INDETERMINATE:
                entry.degraded = True
                continue
            for point in line.touch_points:
                for side, beta in _side_betas(point, line, default_beta):
                    item = _point_exponent(point, line.sided, beta, side)
                    entry.points.append(item)
                    entry.degraded |= item.fallback
                    (one_sided if line.sided == Sidedness.ONE_SIDED else two_sided).append(item)
        if one_sided:
            entry.beta_v = min(p.exponent for p in one_sided)
        if two_sided:
            entry.gamma_v = max(p.exponent for p in two_sided)
        directions.append(entry)

    exponents = [p.beta for d in directions for p in d.points]
    low = [b for b in exponents if b < MIN_DAMPING_EXPONENT]
    if low:
        message = (
            f"damping exponent {min(low):g} is below {MIN_DAMPING_EXPONENT:g}; "
            "the predicted rate is outside the proven range"
        )
        logger.warning(message)
        warnings.append(message)

    degraded = any(d.degraded for d in directions) or not report.orders_resolved
    if degraded:
        warnings.append("some glancing points have no resolved order; beta used unimproved")

    betas = [d.beta_v for d in directions if d.beta_v is not None]
    gammas = [d.gamma_v for d in directions if d.gamma_v is not None]
    if report.G_empty or not (betas or gammas):
        prediction = DecayPrediction(regime=DecayRegime.GCC_EXPONENTIAL, directions=directions)
    elif not report.L1_empty and betas:
        beta_prime = min(betas)
        prediction = DecayPrediction(
            regime=DecayRegime.ONE_SIDED,
            alpha=one_sided_alpha(beta_prime),
            beta_prime=beta_prime,
            gamma_prime=max(gammas) if gammas else None,
            directions=directions,
        )
    else:
        gamma_prime = max(gammas)
        prediction = DecayPrediction(
            regime=DecayRegime.TWO_SIDED_ONLY,
            alpha=two_sided_alpha(gamma_prime),
            gamma_prime=gamma_prime,
            directions=directions,
        )
    prediction = prediction.model_copy(update={"degraded": degraded, "warnings": warnings})
    logger.info(
        f"Decay prediction for {report.shape_id}: {prediction.regime.value}, "
        f"alpha={prediction.alpha if prediction.alpha is not None else 'exponential'}"
    )
    return prediction


def rate_table(
    betas: Iterable[float], cases: Sequence[str] = tuple(CASE_ORDERS)
) -> pd.DataFrame:
    """alpha for each case and damping exponent.

    Case A is a flat contact (strip), B a point of order 2 (disk) and C a
    transverse vertex of order 1 (polygon).
    """
    rows = []
    for beta in betas:
        for case in cases:
            if case not in CASE_ORDERS:
                raise DomainError(f"unknown case '{case}', expected one of {list(CASE_ORDERS)}")
            eta = CASE_ORDERS[case]
            exponent = beta if eta is None else exponent_transform(beta, eta)
            rows.append(
                {
                    "case": case,
                    "beta": beta,
                    "eta": math.nan if eta is None else eta,
                    "beta_v": exponent,
                    "alpha": one_sided_alpha(exponent),
                }
            )
    return pd.DataFrame(rows, columns=["case", "beta", "eta", "beta_v", "alpha"])


def prediction_table(predictions: Dict[str, DecayPrediction]) -> pd.DataFrame:
    """One row per labelled prediction, for report emission."""
    rows = [
        {
            "label": label,
            "regime": p.regime.value,
            "alpha": p.alpha,
            "beta_prime": p.beta_prime,
            "gamma_prime": p.gamma_prime,
            "degraded": p.degraded,
        }
        for label, p in predictions.items()
    ]
    return pd.DataFrame(
        rows, columns=["label", "regime", "alpha", "beta_prime", "gamma_prime", "degraded"]
    )
