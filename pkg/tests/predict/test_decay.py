import math

import pytest

from app.analysis.glancing import glancing_report
from app.exceptions import DomainError
from app.geometry.field import DampingField
from app.geometry.scene import load_scene
from app.geometry.torus import DirectionFrame, RationalDirection, TorusPoint
from app.predict.decay import (
    MIN_DAMPING_EXPONENT,
    DecayRegime,
    alpha_for_order,
    exponent_transform,
    one_sided_alpha,
    predict,
    prediction_table,
    rate_table,
    two_sided_alpha,
)
from app.schema import (
    DirectionSummary,
    GlancingLine,
    GlancingPoint,
    GlancingReport,
    OrderStatus,
    Sidedness,
)

from tests.conftest import SCENES


@pytest.mark.parametrize(
    "beta,eta,expected",
    [(9.0, 2.0, 9.5), (9.0, 1.0, 10.0), (2.0, 0.5, 6.0), (2.0, 4.0, 2.25), (3.0, 1.0, 4.0)],
)
def test_exponent_transform(beta, eta, expected):
    assert exponent_transform(beta, eta) == pytest.approx(expected)


@pytest.mark.parametrize("beta,eta", [(0.0, 1.0), (9.0, 0.0), (-1.0, 2.0)])
def test_exponent_transform_domain(beta, eta):
    with pytest.raises(DomainError):
        exponent_transform(beta, eta)


def test_alpha_formulas():
    assert one_sided_alpha(9.0) == pytest.approx(11 / 12)
    assert two_sided_alpha(2.5) == pytest.approx(1.8)
    assert alpha_for_order(9.0, None) == pytest.approx(11 / 12)
    assert alpha_for_order(9.0, 2.0) == pytest.approx(1 - 1 / 12.5)


def test_alpha_increases_towards_one_as_order_shrinks():
    alphas = [alpha_for_order(9.0, eta) for eta in (1.0, 0.5, 0.1, 0.01)]
    assert alphas == sorted(alphas)
    assert all(a < 1.0 for a in alphas)
    assert alphas[-1] > 0.999


def test_rate_table_cases():
    table = rate_table([9.0])
    by_case = dict(zip(table["case"], table["alpha"]))
    assert by_case["A"] == pytest.approx(11 / 12)
    assert by_case["B"] == pytest.approx(1 - 1 / 12.5)
    assert by_case["C"] == pytest.approx(12 / 13)
    assert math.isnan(table.loc[table["case"] == "A", "eta"].iloc[0])


def test_rate_table_alpha_is_monotone_in_beta():
    table = rate_table([9.0, 12.0, 20.0], cases=["B"])
    assert table["alpha"].is_monotonic_increasing
    assert len(table) == 3


def test_rate_table_unknown_case():
    with pytest.raises(DomainError):
        rate_table([9.0], cases=["D"])


def test_disk_prediction():
    field = load_scene(SCENES / "disk.json").field()
    prediction = predict(glancing_report(field), field)
    assert prediction.regime == DecayRegime.ONE_SIDED
    assert prediction.beta_prime == pytest.approx(9.5)
    assert prediction.alpha == pytest.approx(1 - 1 / 12.5)
    assert not prediction.degraded
    assert prediction.warnings == []
    assert prediction.rate.startswith("t^(-1/")


def test_gcc_prediction_is_exponential():
    field = load_scene(SCENES / "gcc_cross.json").field()
    prediction = predict(glancing_report(field), field)
    assert prediction.regime == DecayRegime.GCC_EXPONENTIAL
    assert prediction.alpha is None
    assert prediction.rate == "exponential"


def test_flat_edges_fall_back_to_beta(square):
    field = DampingField(shape=square, beta=9.0)
    prediction = predict(glancing_report(field), field)
    assert prediction.regime == DecayRegime.ONE_SIDED
    assert prediction.beta_prime == pytest.approx(9.0)
    assert prediction.alpha == pytest.approx(11 / 12)
    assert prediction.degraded
    assert any("unimproved" in w for w in prediction.warnings)


def _single_point_report(order, damping_exponent, side_exponents=None, sided=Sidedness.TWO_SIDED):
    direction = RationalDirection(p=1, q=0)
    frame = DirectionFrame(direction=direction)
    point = GlancingPoint(
        location=TorusPoint(x=0.5, y=0.3),
        direction=direction,
        s_offset=0.3,
        sided=Sidedness.ONE_SIDED,
        damped_side=1,
        order=order,
        order_status=OrderStatus.ANALYTIC,
        damping_exponent=damping_exponent,
        side_exponents=side_exponents or {},
    )
    open_side = -1 if sided == Sidedness.ONE_SIDED else None
    line = GlancingLine(
        frame=frame, s_offset=0.3, sided=sided, open_side=open_side, touch_points=[point]
    )
    return GlancingReport(
        shape_id="synthetic",
        shape_kind="disk",
        inradius=0.1,
        inradius_upper=0.1,
        candidate_directions=[direction],
        directions=[DirectionSummary(direction=direction, lines=[line])],
        L1_empty=sided != Sidedness.ONE_SIDED,
        G_empty=False,
    )


def test_two_sided_only_regime():
    prediction = predict(_single_point_report(2.0, 2.0))
    assert prediction.regime == DecayRegime.TWO_SIDED_ONLY
    assert prediction.gamma_prime == pytest.approx(2.5)
    assert prediction.alpha == pytest.approx(1.8)
    assert prediction.alpha > 1


def test_low_damping_exponent_warns():
    prediction = predict(_single_point_report(2.0, 2.0))
    assert 2.0 < MIN_DAMPING_EXPONENT
    assert any("below" in w for w in prediction.warnings)


def test_point_without_exponent_needs_a_field():
    with pytest.raises(DomainError):
        predict(_single_point_report(2.0, None))
    field = load_scene(SCENES / "disk.json").field()
    prediction = predict(_single_point_report(2.0, None), field)
    assert prediction.gamma_prime == pytest.approx(9.5)


def test_prediction_table():
    field = load_scene(SCENES / "disk.json").field()
    table = prediction_table({"disk": predict(glancing_report(field), field)})
    assert table.loc[0, "regime"] == "one_sided_regime"
    assert table.loc[0, "alpha"] == pytest.approx(1 - 1 / 12.5)


@pytest.mark.parametrize(
    "scene,alpha",
    [("case_a_strip", 11 / 12), ("case_b_disk", 1 - 1 / 12.5), ("case_c_rotated_square", 12 / 13)],
)
def test_bundled_cases(scene, alpha):
    field = load_scene(SCENES / f"{scene}.json").field()
    prediction = predict(glancing_report(field), field)
    assert prediction.regime == DecayRegime.ONE_SIDED
    assert prediction.alpha == pytest.approx(alpha)


def test_two_sided_point_contributes_one_exponent_per_side():
    prediction = predict(_single_point_report(2.0, 9.0, side_exponents={1: 9.0, -1: 12.0}))
    (direction,) = prediction.directions
    assert sorted((p.side, p.exponent) for p in direction.points) == [(-1, 12.5), (1, 9.5)]
    assert prediction.gamma_prime == pytest.approx(12.5)
    assert prediction.alpha == pytest.approx(1.16)


def test_one_sided_line_uses_the_exponent_of_its_damped_side():
    report = _single_point_report(2.0, 9.0, side_exponents={1: 9.0, -1: 12.0}, sided=Sidedness.ONE_SIDED)
    prediction = predict(report)
    assert prediction.regime == DecayRegime.ONE_SIDED
    (item,) = prediction.directions[0].points
    assert item.side == 1
    assert prediction.beta_prime == pytest.approx(9.5)
