import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.exceptions import DomainError
from app.oracle.distance import (
    ModelCurve,
    exact_distance,
    model_gap,
    sample_cloud,
    sandwich_check,
    sandwich_sweep,
    swapped_distance,
)


PARABOLA = ModelCurve(eta=2.0, c=1.0)


def test_wedge_closed_form():
    wedge = ModelCurve(eta=1.0, c=1.0)
    assert exact_distance(wedge, [[0.0, 1.0]])[0] == pytest.approx(1 / math.sqrt(2))
    assert exact_distance(wedge, [[0.3, 0.3]])[0] == pytest.approx(0.0, abs=1e-15)


def test_wedge_closed_form_agrees_with_search(rng):
    points = sample_cloud(0.1, 50, rng)
    closed = exact_distance(ModelCurve(eta=1.0, c=2.0), points)
    searched = exact_distance(ModelCurve(eta=1.0 + 1e-9, c=2.0), points, samples=20_001)
    assert searched == pytest.approx(closed, abs=1e-8)


def test_parabola_distances():
    d = exact_distance(PARABOLA, [[1.0, 0.0], [0.25, 0.5], [0.0, 0.0]], samples=20_001)
    assert d[0] == pytest.approx(math.sqrt(0.75), rel=1e-8)
    assert d[1] == pytest.approx(0.0, abs=1e-9)
    assert d[2] == pytest.approx(0.0, abs=1e-12)


def test_swapped_curve_gives_the_same_distance(rng):
    points = np.abs(sample_cloud(0.1, 40, rng))
    direct = exact_distance(PARABOLA, points, samples=20_001)
    mirrored = swapped_distance(PARABOLA, points, samples=20_001)
    assert mirrored == pytest.approx(direct, rel=1e-6, abs=1e-12)
    swapped = PARABOLA.swapped()
    assert swapped.eta == 0.5
    assert swapped.c == pytest.approx(1.0)


def test_swapped_distance_needs_upper_half():
    with pytest.raises(DomainError):
        swapped_distance(PARABOLA, [[0.1, -0.1]])


def test_model_gap():
    assert model_gap(PARABOLA, [[1.0, 0.0]])[0] == pytest.approx(1.0)
    assert model_gap(ModelCurve(eta=0.5, c=1.0), [[0.5, 0.0]])[0] == pytest.approx(0.25)


@pytest.mark.parametrize("eta", [0.5, 1.0, 2.0, 3.0])
def test_sandwich_is_bounded(rng, eta):
    curve = ModelCurve(eta=eta, c=1.0)
    report = sandwich_check(curve, sample_cloud(0.1, 2000, rng), epsilon=0.1)
    assert report.bounded
    assert report.count + report.excluded == 2000
    assert report.min_ratio <= report.max_ratio
    assert math.isfinite(report.constant)


def test_sandwich_sweep_is_seeded():
    first = sandwich_sweep(PARABOLA, [0.1, 0.05], count=500, seed=4)
    second = sandwich_sweep(PARABOLA, [0.1, 0.05], count=500, seed=4)
    assert len(first) == 2
    assert [r.max_ratio for r in first] == [r.max_ratio for r in second]


@pytest.mark.parametrize(
    "points,epsilon",
    [
        ([[0.05, 0.05]], 0.2),
        ([[0.05, 0.5]], 0.1),
        ([[-0.01, 0.0]], 0.1),
        ([[0.0, 0.0], [0.01, 0.1]], 0.1),
        ([[0.1, 0.2, 0.3]], 0.1),
    ],
)
def test_sandwich_domain_errors(points, epsilon):
    with pytest.raises(DomainError):
        sandwich_check(PARABOLA, points, epsilon=epsilon)


def test_curve_parameters_must_be_positive():
    with pytest.raises(ValidationError):
        ModelCurve(eta=0.0, c=1.0)
