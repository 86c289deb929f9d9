import math

import pytest

from app.exceptions import DomainError
from app.genericity.candidates import CandidateDirectionSet
from app.genericity.polygon import (
    polygon_exceptional_rotations,
    polygon_in_Q,
    polygon_membership,
)
from app.geometry.polygon import Polygon


def test_candidate_set_size_parameter():
    assert CandidateDirectionSet.for_inradius(0.25).k == 5
    assert CandidateDirectionSet.for_inradius(0.5).k == 3
    small = CandidateDirectionSet.for_inradius(0.1)
    large = CandidateDirectionSet.for_inradius(0.3)
    assert {str(v) for v in large.directions} <= {str(v) for v in small.directions}
    assert all(0.0 <= angle < math.pi for angle in small.angles)
    assert len(small) == len(small.directions)


def test_candidate_set_needs_positive_inradius():
    with pytest.raises(DomainError):
        CandidateDirectionSet.for_inradius(0.0)


def test_axis_square_is_not_generic(square):
    membership = polygon_in_Q(square)
    assert not membership.member
    assert membership.exact
    assert membership.witness is not None
    assert len(membership.alignments) == 4
    assert "parallel" in str(membership.witness)


def test_triangle_edge_on_a_lattice_direction():
    triangle = Polygon.from_vertices([(0.3, 0.3), (0.4, 0.5), (0.2, 0.6)])
    membership = polygon_in_Q(triangle)
    assert not membership.member
    witness = membership.witness
    assert witness.edge == 0
    assert witness.direction.q * 1 - witness.direction.p * 2 == 0


def test_rotated_square_is_generic(rotated_square):
    membership = polygon_in_Q(rotated_square)
    assert membership.member
    assert not membership.exact
    assert membership.witness is None


def test_membership_labels(square, rotated_square):
    generic = polygon_membership(rotated_square, seed=7)
    assert generic.label == "Q"
    assert generic.in_q_prime
    assert generic.openness_trials == 8
    assert generic.openness_failures == 0
    aligned = polygon_membership(square, seed=7)
    assert aligned.label == "not Q'"
    assert aligned.openness_trials == 0


def test_polygon_must_embed():
    with pytest.raises(DomainError):
        polygon_in_Q(Polygon.square((0.5, 0.5), 1.2))


def test_exceptional_rotations_of_the_square(square):
    diagnostics = polygon_exceptional_rotations(square)
    thetas = [a.theta for a in diagnostics.angles]
    assert thetas == sorted(thetas)
    assert all(0.0 <= t < math.pi for t in thetas)
    assert all(b - a > 1e-12 for a, b in zip(thetas, thetas[1:]))
    assert thetas[0] == 0.0
    assert any(t == pytest.approx(0.25 * math.pi) for t in thetas)
    assert any(t == pytest.approx(math.atan(2.0)) for t in thetas)
    assert all(a.admissible for a in diagnostics.angles)
    assert diagnostics.notes == ["angles are modulo pi"]


def test_rotating_onto_an_exceptional_angle_breaks_genericity(rotated_square):
    diagnostics = polygon_exceptional_rotations(rotated_square)
    angle = diagnostics.angles[0]
    assert "parallel" in angle.reason
    turned = rotated_square.rotated(angle.theta)
    assert not polygon_in_Q(turned, diagnostics.candidates).member


def test_rotation_frame(square):
    frame = polygon_exceptional_rotations(square).to_frame()
    assert list(frame.columns) == ["theta", "edge", "direction", "admissible"]
    assert len(frame) > 0


def test_square_fails_at_listed_angles_and_passes_between_them(square):
    diagnostics = polygon_exceptional_rotations(square)
    thetas = [a.theta for a in diagnostics.angles]
    for theta in thetas:
        assert not polygon_in_Q(square.rotated(theta), diagnostics.candidates).member
    ends = thetas + [thetas[0] + math.pi]
    for a, b in zip(ends, ends[1:]):
        turned = square.rotated(0.5 * (a + b))
        assert polygon_in_Q(turned, diagnostics.candidates).member
