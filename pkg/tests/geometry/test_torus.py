import math

import numpy as np
import pytest

from app.exceptions import DomainError
from app.geometry.torus import (
    DirectionFrame,
    RationalDirection,
    TorusPoint,
    enumerate_candidate_directions,
    geodesic_sample,
    torus_distance,
    transverse_step,
)


def keys(directions):
    return {v.key for v in directions}


def test_disk_inradius_gives_the_eight_roots_of_unity():
    found = enumerate_candidate_directions(1.0 / (2.0 * math.sqrt(2.0)))
    assert keys(found) == {(1, 0), (0, 1), (1, 1), (1, -1)}


def test_half_inradius_leaves_only_axis_directions():
    assert keys(enumerate_candidate_directions(0.5)) == {(1, 0), (0, 1)}


def test_small_inradius_enumerates_coprime_pairs():
    found = keys(enumerate_candidate_directions(0.1))
    assert (3, 4) in found
    assert (4, -3) in found
    assert all(math.gcd(p, abs(q)) == 1 for p, q in found)
    assert all(p * p + q * q <= 25 for p, q in found)
    # brute force over the box
    expected = {
        (p, q)
        for p in range(0, 6)
        for q in range(-5, 6)
        if (p > 0 or q > 0) and p * p + q * q <= 25 and math.gcd(p, abs(q)) == 1
    }
    assert found == expected


@pytest.mark.parametrize("bad", [0.0, -0.1, 0.6])
def test_enumeration_rejects_bad_inradius(bad):
    with pytest.raises(DomainError):
        enumerate_candidate_directions(bad)


def test_enumeration_count_and_boundary_cases(rng):
    for eps in rng.uniform(0.05, 0.5, 50):
        found = enumerate_candidate_directions(eps)
        assert 2 * len(found) <= 1.0 / eps**2
        bound = math.floor(1.0 / (4.0 * eps * eps))
        assert all(v.period_squared <= bound for v in found)
    # p^2 + q^2 equal to the bound is included
    eps = 1.0 / (2.0 * math.sqrt(5.0))
    assert (1, 2) in keys(enumerate_candidate_directions(eps))


def test_enumeration_is_antitone_in_the_inradius(rng):
    radii = np.sort(rng.uniform(0.05, 0.5, 20))
    for small, large in zip(radii, radii[1:]):
        assert keys(enumerate_candidate_directions(large)) <= keys(enumerate_candidate_directions(small))


def test_direction_canonical_form():
    v = RationalDirection.from_any(-2, -4)
    assert v.key == (1, 2)
    assert RationalDirection.from_any(0, -3).key == (0, 1)
    assert RationalDirection.parse("3,-6").key == (1, -2)
    assert v.period_squared == 5
    assert float(v.unit @ v.perp) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        RationalDirection.parse("1;2")
    with pytest.raises(DomainError):
        RationalDirection.from_any(0, 0)


@pytest.mark.parametrize(
    "pq, expected, norm",
    [((1, 0), (0.0, 1.0), 1.0), ((1, 2), (-0.4, 0.2), 1 / math.sqrt(5)), ((3, 4), (-0.16, 0.12), 0.2)],
)
def test_transverse_step(pq, expected, norm):
    step = transverse_step(RationalDirection(p=pq[0], q=pq[1]))
    assert step == pytest.approx(expected)
    assert np.linalg.norm(step) == pytest.approx(norm)


def test_transverse_step_keeps_the_geodesic():
    frame = DirectionFrame.of(3, 4)
    z = np.array([0.123, 0.456])
    s0, _ = frame.st_coordinates(z)
    s1, _ = frame.st_coordinates(z + transverse_step(frame.direction))
    assert frame.s_distance(s0, s1) == pytest.approx(0.0, abs=1e-12)
    # brute force: the shifted point lies on the sampled line through z
    line = frame.to_torus(np.full(5000, s0), np.linspace(0.0, frame.t_circumference, 5000))
    shifted = np.mod(z + transverse_step(frame.direction), 1.0)
    assert torus_distance(line, shifted).min() < 2e-3


def test_frame_circumferences_multiply_to_one():
    for pq in [(1, 0), (1, 1), (2, -3), (5, 7)]:
        frame = DirectionFrame.of(*pq)
        assert frame.s_circumference * frame.t_circumference == pytest.approx(1.0)


def test_st_coordinates_invert_the_chart(rng):
    frame = DirectionFrame.of(2, 3)
    for s, t in zip(rng.uniform(0, frame.s_circumference, 20), rng.uniform(0, frame.t_circumference, 20)):
        z = frame.to_torus(s, t)
        s2, t2 = frame.st_coordinates(z)
        assert frame.s_distance(s, s2) == pytest.approx(0.0, abs=1e-10)
        assert torus_distance(frame.to_torus(s2, t2), z) == pytest.approx(0.0, abs=1e-10)


def test_horizontal_geodesic_sample():
    points = geodesic_sample(DirectionFrame.of(1, 0), 0.25, 4)
    got = sorted((p.x, p.y) for p in points)
    assert got == pytest.approx([(0.0, 0.25), (0.25, 0.25), (0.5, 0.25), (0.75, 0.25)])


def test_diagonal_geodesic_sample():
    points = geodesic_sample(DirectionFrame.of(1, 1), 0.0, 2)
    assert points[1].distance(points[0]) == pytest.approx(math.sqrt(0.5))


def test_geodesic_sample_points_are_spaced_along_the_line():
    frame = DirectionFrame.of(1, 2)
    points = np.array([p.as_array() for p in geodesic_sample(frame, 0.1, 10)])
    gaps = torus_distance(points[:, None, :], points[None, :, :])
    off_diagonal = gaps[~np.eye(10, dtype=bool)]
    assert off_diagonal.min() >= math.sqrt(5.0) / 10 - 1e-9


def test_geodesic_sample_needs_two_points():
    with pytest.raises(DomainError):
        geodesic_sample(DirectionFrame.of(1, 0), 0.0, 1)


def test_torus_point_reduces_coordinates():
    z = TorusPoint(x=1.25, y=-0.25)
    assert (z.x, z.y) == pytest.approx((0.25, 0.75))
    assert z.distance(TorusPoint(x=0.95, y=0.75)) == pytest.approx(0.3)
