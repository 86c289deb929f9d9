import math

import numpy as np
import pytest

from app.config import GenericitySettings
from app.exceptions import DomainError
from app.genericity.candidates import CandidateDirectionSet
from app.genericity.curve import (
    ZERO_TOLERANCE,
    curve_exceptional_rotation_set,
    curve_f_gamma,
    curve_in_Y,
)
from app.geometry.curves import SmoothCurve, SuperEllipse


SETTINGS = GenericitySettings(curve_samples=512, max_refinements=3)


def test_f_gamma_of_a_disk_is_at_least_its_curvature(disk):
    candidates = CandidateDirectionSet.for_inradius(disk.radius)
    t = np.linspace(0.0, 2 * math.pi, 50)
    values = curve_f_gamma(disk, t, candidates)
    assert values.shape == (50,)
    assert np.all(values >= 1.0 / disk.radius)


def test_disk_is_generic(disk):
    membership = curve_in_Y(disk, settings=SETTINGS)
    assert membership.status == "in_Y"
    assert membership.member
    assert membership.lower_bound > 0
    assert membership.samples == 512


def test_flat_superellipse_tip_is_not_generic(superellipse):
    membership = curve_in_Y(superellipse, settings=SETTINGS)
    assert membership.status == "not_in_Y"
    assert membership.member is False
    assert membership.min_f <= ZERO_TOLERANCE
    assert membership.argmin == pytest.approx(0.0, abs=1e-6)


def test_disk_has_no_exceptional_rotations(disk):
    diagnostics = curve_exceptional_rotation_set(disk, settings=SETTINGS)
    assert diagnostics.cover == []
    assert diagnostics.measure == 0.0
    assert diagnostics.measure_history == [0.0, 0.0, 0.0]
    assert diagnostics.converging


def test_superellipse_exceptional_cover(superellipse):
    diagnostics = curve_exceptional_rotation_set(superellipse, settings=SETTINGS)
    assert diagnostics.measure > 0
    assert len(diagnostics.measure_history) == 3
    assert all(0.0 <= a <= b <= math.pi for a, b in diagnostics.cover)
    # the tips are axis-parallel, so the identity rotation is exceptional
    assert any(a <= 0.0 <= b or a <= math.pi <= b for a, b in diagnostics.cover)
    frame = diagnostics.to_frame()
    assert list(frame.columns) == ["start", "end"]


def test_non_curves_are_rejected(square):
    with pytest.raises(DomainError):
        curve_in_Y(square, settings=SETTINGS)
    with pytest.raises(DomainError):
        curve_exceptional_rotation_set(square, settings=SETTINGS)


def test_cusped_superellipse_is_generic_away_from_tips():
    cusp = SuperEllipse(center=(0.5, 0.5), a=0.3, b=0.3, m=0.5, n=0.5)
    candidates = CandidateDirectionSet.for_inradius(0.05)
    values = curve_f_gamma(cusp, [0.3, 1.0, 2.0], candidates)
    assert np.all(values > 0)


def test_superellipse_cover_shrinks_under_refinement(superellipse):
    diagnostics = curve_exceptional_rotation_set(superellipse, settings=SETTINGS)
    history = diagnostics.measure_history
    assert diagnostics.converging
    assert history[-1] < 0.5 * history[0]


def test_ellipse_curve_is_generic():
    ellipse = SmoothCurve.ellipse((0.5, 0.5), 0.3, 0.2, angle=0.4)
    membership = curve_in_Y(ellipse, CandidateDirectionSet.for_inradius(0.2), SETTINGS)
    assert membership.member
    assert membership.lower_bound > 0
    assert membership.min_f >= 0.2 / 0.3**2 - 1e-6
