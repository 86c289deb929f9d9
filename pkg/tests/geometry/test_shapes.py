import math
from fractions import Fraction

import numpy as np
import pytest

from app.exceptions import DomainError
from app.geometry.curves import Disk, SmoothCurve, SuperEllipse
from app.geometry.polygon import Polygon
from app.geometry.shapes import (
    ShapeUnion,
    Strip,
    contains,
    curvature,
    distance_to_complement,
    inradius,
    line_chords,
    proper_projection_check,
    support_interval,
)
from app.geometry.torus import DirectionFrame, torus_distance
from app.logger import logger

from tests.conftest import DISK_RADIUS


def test_disk_membership(disk):
    assert contains(disk, (0.5, 0.5))
    assert not contains(disk, (0.5 + DISK_RADIUS, 0.5))
    assert not contains(disk, (0.0, 0.0))


def test_disk_distance(disk):
    assert distance_to_complement(disk, (0.5, 0.5)) == pytest.approx(DISK_RADIUS)
    assert distance_to_complement(disk, (0.5, 0.6)) == pytest.approx(DISK_RADIUS - 0.1)
    assert distance_to_complement(disk, (0.0, 0.0)) == 0.0


def test_distance_wraps_around_the_torus():
    small = Disk(center=(0.05, 0.5), radius=0.1)
    assert contains(small, (0.98, 0.5))
    assert distance_to_complement(small, (0.98, 0.5)) == pytest.approx(0.03)


def test_distance_accepts_point_arrays(square):
    values = distance_to_complement(square, np.array([[0.5, 0.5], [0.3, 0.5], [0.1, 0.1]]))
    assert values == pytest.approx([0.25, 0.05, 0.0])


def test_strip_distance(strip):
    assert distance_to_complement(strip, (0.5, 0.9)) == pytest.approx(0.25)
    assert distance_to_complement(strip, (0.3, 0.1)) == pytest.approx(0.05)
    assert distance_to_complement(strip, (0.1, 0.1)) == 0.0
    assert not contains(strip, (0.25, 0.5))


def test_strip_rejects_bad_width():
    with pytest.raises(DomainError):
        Strip(normal=(1, 0), lo=0.5, hi=0.4)
    with pytest.raises(DomainError):
        Strip(normal=(0, 0), lo=0.1, hi=0.4)


def test_union_takes_the_larger_distance():
    cross = ShapeUnion(
        members=[
            Strip(normal=(1, 0), lo=0.4, hi=0.6),
            Strip(normal=(0, 1), lo=0.4, hi=0.6),
        ]
    )
    assert distance_to_complement(cross, (0.5, 0.05)) == pytest.approx(0.1)
    assert distance_to_complement(cross, (0.5, 0.5)) == pytest.approx(0.1)
    assert not contains(cross, (0.1, 0.1))


def test_exact_inradius(disk, strip):
    estimate = inradius(disk)
    assert estimate.lower == estimate.upper == pytest.approx(DISK_RADIUS)
    assert estimate.center.distance(estimate.center.from_array((0.5, 0.5))) == pytest.approx(0.0)
    assert inradius(strip).value == pytest.approx(0.25)


def test_branch_and_bound_inradius(square):
    estimate = inradius(square)
    assert estimate.lower <= estimate.upper
    assert estimate.lower == pytest.approx(0.25, abs=1e-5)
    assert estimate.upper - estimate.lower <= 1e-5
    assert estimate.center.distance(estimate.center.from_array((0.5, 0.5))) < 1e-4


def test_proper_projection():
    assert proper_projection_check(Disk(center=(0.5, 0.5), radius=0.35))
    assert not proper_projection_check(Disk(center=(0.5, 0.5), radius=0.6))
    assert proper_projection_check(Strip(normal=(1, 1), lo=0.1, hi=0.3))


def test_curvature(disk, strip):
    assert curvature(disk, 0.3) == pytest.approx(1.0 / DISK_RADIUS)
    assert curvature(disk, np.linspace(0, 1, 4)) == pytest.approx(np.full(4, 1.0 / DISK_RADIUS))
    with pytest.raises(DomainError):
        curvature(strip, 0.0)


def test_superellipse_flattens_at_its_axis_tips(superellipse):
    # curvature vanishes at the tips for exponent 4 and is positive between them
    assert curvature(superellipse, 0.0) == pytest.approx(0.0, abs=1e-6)
    assert curvature(superellipse, math.pi / 4) > 0


def test_shadow_of_a_disk(disk):
    (start, length), = support_interval(disk, DirectionFrame.of(1, 0))
    assert start == pytest.approx(0.5 - DISK_RADIUS)
    assert length == pytest.approx(2 * DISK_RADIUS)


def test_line_chords_through_the_disk(disk):
    chords = line_chords(disk, (0.0, 0.5), (1.0, 0.0), 1.0)
    assert len(chords) == 1
    assert chords[0] == pytest.approx((0.5 - DISK_RADIUS, 0.5 + DISK_RADIUS))


def test_line_chords_cross_the_seam():
    small = Disk(center=(0.05, 0.5), radius=0.1)
    chords = line_chords(small, (0.5, 0.5), (1.0, 0.0), 1.0)
    # x = 0.5 + t lies in [0.95, 1.15] for t in [0.45, 0.65]
    assert len(chords) == 1
    assert chords[0] == pytest.approx((0.45, 0.65))


def test_square_edges_are_exact(square):
    half = Fraction(1, 2)
    assert square.edge_fractions == [(half, 0), (0, half), (-half, 0), (0, -half)]
    assert square.vertices == pytest.approx(np.array([[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]]))


def test_rotated_square_is_inexact(rotated_square):
    assert rotated_square.edge_fractions is None
    lengths = np.linalg.norm(rotated_square.edge_vectors, axis=1)
    assert lengths == pytest.approx(np.full(4, 0.5))
    assert rotated_square.vertices.mean(axis=0) == pytest.approx([0.5, 0.5])


@pytest.mark.parametrize(
    "edges",
    [
        [(0.5, 0.0), (-0.5, 0.0)],
        [(0.5, 0.0), (0.0, 0.0), (-0.5, 0.0), (0.0, 0.0)],
        [(0.5, 0.0), (0.0, 0.5), (-0.4, 0.0), (0.0, -0.5)],
    ],
)
def test_polygon_validation(edges):
    with pytest.raises(DomainError):
        Polygon(edges=edges, anchor=(0.2, 0.2))


def test_self_intersecting_polygon():
    with pytest.raises(DomainError):
        Polygon.from_vertices([(0.2, 0.2), (0.6, 0.6), (0.6, 0.2), (0.2, 0.6)])


@pytest.mark.parametrize("name", ["disk", "rotated_square", "superellipse", "strip"])
def test_distance_is_one_lipschitz_and_matches_membership(name, request, rng):
    shape = request.getfixturevalue(name)
    a = rng.random((400, 2))
    b = a + rng.normal(scale=0.05, size=a.shape)
    da = shape.distance_to_complement(a)
    db = shape.distance_to_complement(b)
    assert np.all(np.abs(da - db) <= torus_distance(a, b) + 1e-9)
    assert np.array_equal(shape.contains(a, tol=0.0), da > 0)


def test_curvature_ignores_the_parametrization():
    ellipse = SmoothCurve.ellipse((0.5, 0.5), 0.3, 0.2)
    assert curvature(ellipse, 0.0) == pytest.approx(0.3 / 0.2**2)
    taus = np.linspace(0.0, 2 * math.pi, 256, endpoint=False)
    warped = taus + 0.3 * np.sin(taus)
    again = SmoothCurve.from_samples(ellipse.position(warped))
    assert curvature(again, taus) == pytest.approx(curvature(ellipse, warped), rel=1e-8)


def test_circle_curve_matches_the_disk(disk):
    circle = SmoothCurve.circle((0.5, 0.5), DISK_RADIUS)
    z = np.array([[0.5, 0.5], [0.6, 0.55], [0.9, 0.9]])
    assert circle.distance_to_complement(z) == pytest.approx(disk.distance_to_complement(z), abs=1e-9)


def test_curve_samples_must_form_a_table():
    with pytest.raises(DomainError):
        SmoothCurve.from_samples(np.zeros((4, 2)))


def test_perturbing_vertices_moves_the_inradius_by_at_most_the_perturbation(rotated_square, rng):
    eps = 1e-3
    base = inradius(rotated_square)
    kicks = rng.normal(size=rotated_square.vertices.shape)
    kicks *= eps / np.linalg.norm(kicks, axis=1, keepdims=True)
    moved = Polygon.from_vertices((rotated_square.vertices + kicks).tolist(), exact=False)
    after = inradius(moved)
    assert after.upper >= base.lower - eps
    assert base.upper >= after.lower - eps
    assert contains(moved, base.center.as_array())


def test_superellipse_regularity_follows_its_exponents(superellipse):
    assert superellipse.is_regular
    assert not SuperEllipse(center=(0.5, 0.5), a=0.3, b=0.3, m=0.5, n=0.5).is_regular


def test_closest_point_logs_when_the_dense_sample_wins(superellipse):
    messages = []
    handler = logger.add(messages.append, level="DEBUG", format="{message}")
    try:
        _, samples = superellipse._dense
        dist, _ = superellipse.closest_point(samples[:4], iterations=1)
    finally:
        logger.remove(handler)
    assert dist == pytest.approx(np.zeros(4), abs=1e-15)
    assert any("kept the dense sample" in m for m in messages)
