import math

import numpy as np
import pytest

from app.analysis.averaging import (
    AveragedProfile,
    average_along,
    average_direction,
    exact_mass,
    fit_vanishing_exponent,
    fit_zero_set,
    fubini_check,
    local_average_bounds,
    zero_set,
)
from app.analysis.glancing import find_glancing_lines
from app.exceptions import AnalysisError, DomainError, InconsistencyError
from app.geometry.curves import Disk
from app.geometry.field import DampingField
from app.geometry.torus import DirectionFrame

from tests.conftest import DISK_RADIUS


HORIZONTAL = DirectionFrame.of(1, 0)
DIAGONAL = DirectionFrame.of(1, 1)


@pytest.fixture(scope="module")
def disk_setup():
    field = DampingField(shape=Disk(center=(0.5, 0.5), radius=DISK_RADIUS), beta=9.0)
    lines = find_glancing_lines(field, HORIZONTAL.direction)
    profile = average_direction(field, HORIZONTAL, lines)
    return field, lines, profile


def test_average_through_the_disk_center(disk_field):
    profile = average_along(disk_field, HORIZONTAL, [0.5])
    assert profile.values[0] == pytest.approx(2 * DISK_RADIUS**10 / 10, rel=1e-9)


def test_average_of_a_strip_is_its_profile(strip):
    field = DampingField(shape=strip, beta=9.0)
    profile = average_along(field, DirectionFrame.of(0, 1), [0.5, 0.7, 0.9])
    assert profile.values == pytest.approx([0.25**9, 0.05**9, 0.0], rel=1e-9, abs=1e-30)


def test_indicator_average_is_the_chord_fraction(disk):
    field = DampingField(shape=disk, profile="indicator")
    profile = average_along(field, HORIZONTAL, [0.5, 0.6])
    chord = 2 * math.sqrt(DISK_RADIUS**2 - 0.01)
    assert profile.values == pytest.approx([2 * DISK_RADIUS, chord], rel=1e-9)


def test_profile_frame_and_glancing_offsets(disk_setup):
    _, lines, profile = disk_setup
    table = profile.to_frame()
    assert list(table.columns) == ["s", "A_v", "quadrature_error"]
    for line in lines:
        assert np.any(np.isclose(profile.s_grid, line.s_offset, atol=1e-15))
    assert np.all(profile.values >= 0)


def test_zero_band_between_one_sided_lines(disk_setup):
    _, lines, profile = disk_setup
    zeros = zero_set(profile, lines)
    assert zeros.points == []
    assert len(zeros.intervals) == 1
    alpha, rho = zeros.intervals[0]
    assert alpha == pytest.approx(0.5 + DISK_RADIUS)
    assert rho == pytest.approx(0.5 - DISK_RADIUS)


def test_isolated_zero_on_a_two_sided_line(disk_field):
    lines = find_glancing_lines(disk_field, DIAGONAL.direction)
    profile = average_direction(disk_field, DIAGONAL, lines)
    zeros = zero_set(profile, lines)
    assert zeros.intervals == []
    assert zeros.points == pytest.approx([lines[0].s_offset])


def test_vanishing_exponent_beside_a_tangency(disk_setup):
    _, lines, profile = disk_setup
    zeros = zero_set(profile, lines)
    fits = fit_zero_set(profile, zeros)
    assert len(fits) == 2
    for fit in fits:
        assert fit.exponent == pytest.approx(9.5, abs=0.05)
        assert fit.summary()["side"] in (1, -1)


def test_local_bounds_are_two_sided(disk_setup):
    _, lines, profile = disk_setup
    zeros = zero_set(profile, lines)
    _, rho = zeros.intervals[0]
    bounds = local_average_bounds(profile, rho, 1, eta=2.0, beta=9.0)
    assert bounds.exponent == pytest.approx(9.5)
    assert 0 < bounds.lower <= bounds.upper
    assert bounds.upper / bounds.lower < 1.5
    assert bounds.constant >= 1.0


def test_zero_run_without_a_line_is_inconsistent(disk_setup):
    _, _, profile = disk_setup
    with pytest.raises(InconsistencyError):
        zero_set(profile, [])


def test_vanishing_profile_is_rejected():
    grid = np.linspace(0.0, 1.0, 8, endpoint=False)
    profile = AveragedProfile(
        frame=HORIZONTAL, s_grid=grid, values=np.zeros(8), quadrature_error=np.zeros(8)
    )
    with pytest.raises(AnalysisError):
        zero_set(profile, [])
    with pytest.raises(DomainError):
        fit_vanishing_exponent(profile, 0.5, 1)


def test_fit_side_must_be_a_sign(disk_setup):
    _, _, profile = disk_setup
    with pytest.raises(DomainError):
        fit_vanishing_exponent(profile, 0.5, 0)


def test_closed_form_masses(disk, strip):
    assert exact_mass(DampingField(shape=disk, profile="indicator")) == pytest.approx(math.pi / 8)
    assert exact_mass(DampingField(shape=strip, beta=1.0)) == pytest.approx(0.0625)
    with_cutoff = DampingField(shape=disk, support_cutoff=0.1)
    assert exact_mass(with_cutoff) is None


def test_fubini_against_the_closed_form(disk_field):
    check = fubini_check(disk_field, DIAGONAL)
    assert check.reference == "closed_form"
    assert check.passed
    assert check.reference_mass == pytest.approx(2 * math.pi * DISK_RADIUS**11 / 110)


def test_fubini_against_another_direction(square):
    field = DampingField(shape=square, beta=2.0)
    check = fubini_check(field, DirectionFrame.of(1, 1))
    assert check.reference == "direction (1,0)"
    assert check.passed
