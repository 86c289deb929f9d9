import math

import numpy as np
import pytest

import app.resolvent.operator as operator
from app.config import ResolventSettings
from app.exceptions import DomainError, StagnationError
from app.resolvent.operator import (
    build_operator,
    constant_norm,
    constant_potential,
    dense_resolvent_norm,
    grid_size_for,
    interval_vanishing_potential,
    pairing_check,
    point_vanishing_potential,
    resolvent_norm,
)


@pytest.mark.parametrize("lam,energy", [(1.0, 0.0), (1.0, 1.0), (10.0, 3.0), (50.0, -2.0)])
def test_dense_norm_matches_circulant_closed_form(lam, energy):
    op = build_operator(constant_potential(1.0, 64), lam=lam, energy=energy)
    assert dense_resolvent_norm(op) == pytest.approx(constant_norm(1.0, lam, 64, energy=energy), rel=1e-10)


def test_constant_norm_at_zero_energy_is_inverse_damping():
    assert constant_norm(2.0, 10.0, 128) == pytest.approx(1.0 / 20.0)


@pytest.mark.parametrize("method", ["lanczos", "power"])
def test_iterative_norm_matches_closed_form(method):
    op = build_operator(constant_potential(1.0, 64), lam=1.0)
    expected = constant_norm(1.0, 1.0, 64)
    assert resolvent_norm(op, method=method, seed=3) == pytest.approx(expected, rel=1e-5)


def test_lanczos_matches_dense_oracle_on_vanishing_potential():
    op = build_operator(interval_vanishing_potential(2.0, n=128), lam=100.0, energy=2.0)
    assert resolvent_norm(op, seed=1) == pytest.approx(dense_resolvent_norm(op), rel=1e-5)


def test_unknown_method_is_rejected():
    op = build_operator(constant_potential(1.0, 16), lam=1.0)
    with pytest.raises(DomainError):
        resolvent_norm(op, method="svd")


def test_dense_oracle_refuses_large_grids():
    op = build_operator(constant_potential(1.0, 1024), lam=1.0)
    with pytest.raises(DomainError):
        dense_resolvent_norm(op)


@pytest.mark.parametrize(
    "potential",
    [np.zeros(32), np.full(32, -1.0), np.ones(2), np.ones((4, 4)), np.array([1.0, np.nan, 1.0])],
)
def test_invalid_potentials(potential):
    with pytest.raises(DomainError):
        build_operator(potential, lam=1.0)


def test_operator_grid_and_laplacian():
    op = build_operator(constant_potential(1.0, 32), lam=5.0, energy=1.5)
    assert op.n == 32
    assert op.h == pytest.approx(2 * math.pi / 32)
    assert op.grid[1] == pytest.approx(op.h)
    assert np.allclose(op.laplacian @ np.ones(32), 0.0)
    assert op.spectrum_top() == pytest.approx(4.0 / op.h**2)
    shifted = op.with_energy(4.0)
    assert shifted.energy == 4.0
    diff = (op.matrix - shifted.matrix).toarray()
    assert np.allclose(diff, 2.5 * np.eye(32))


def test_solve_inverts_the_matrix(rng):
    op = build_operator(point_vanishing_potential(2.0, n=64), lam=20.0, energy=3.0)
    f = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    u = op.solve(f)
    assert np.allclose(op.matrix @ u, f)
    w = op.solve_adjoint(f)
    assert np.allclose(op.matrix.conj().T @ w, f)


def test_stalled_iterations_restart(monkeypatch):
    calls = []
    real = operator._lanczos_norm

    def flaky(op, tol, max_iterations, rng):
        calls.append(1)
        if len(calls) < 3:
            raise StagnationError("stalled")
        return real(op, tol, max_iterations, rng)

    monkeypatch.setattr(operator, "_lanczos_norm", flaky)
    op = build_operator(constant_potential(1.0, 32), lam=1.0)
    assert resolvent_norm(op, seed=0) == pytest.approx(constant_norm(1.0, 1.0, 32), rel=1e-5)
    assert len(calls) == 3


def test_restarts_are_bounded(monkeypatch):
    calls = []

    def stalled(op, tol, max_iterations, rng):
        calls.append(1)
        raise StagnationError("stalled")

    monkeypatch.setattr(operator, "_lanczos_norm", stalled)
    op = build_operator(constant_potential(1.0, 32), lam=1.0)
    with pytest.raises(StagnationError):
        resolvent_norm(op, settings=ResolventSettings(max_restarts=2))
    assert len(calls) == 3


# -- pairing inequalities ------------------------------------------------------


@pytest.mark.parametrize("energy", [0.0, 5.0, 40.0])
def test_first_pairing_inequality_holds(rng, energy):
    op = build_operator(point_vanishing_potential(2.0, n=256), lam=100.0, energy=energy)
    for _ in range(5):
        f = rng.standard_normal(256) + 1j * rng.standard_normal(256)
        report = pairing_check(op, f)
        assert report.first_holds
        assert report.damped_norm <= report.pairing_bound * (1 + 1e-8)
        assert report.gradient_norm is None


def test_second_pairing_inequality_reports_constant(rng):
    potential = interval_vanishing_potential(2.0, n=128)
    op = build_operator(potential, lam=100.0, energy=4.0)
    psi = (potential > 0.05).astype(float)
    f = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    report = pairing_check(op, f, psi)
    assert report.first_holds
    assert report.gradient_norm > 0
    assert report.second_constant == pytest.approx(report.gradient_norm / report.second_rhs_unit)
    assert math.isfinite(report.second_constant)


def test_cutoff_must_vanish_near_undamped_set(rng):
    op = build_operator(interval_vanishing_potential(2.0, n=64), lam=10.0)
    f = rng.standard_normal(64)
    with pytest.raises(DomainError):
        pairing_check(op, f, np.ones(64))
    with pytest.raises(DomainError):
        pairing_check(op, f, np.ones(32))


# -- fixtures ------------------------------------------------------------------


def test_interval_potential_vanishes_on_its_arc():
    n = 256
    v = interval_vanishing_potential(3.0, n=n)
    s = np.arange(n) * (2 * math.pi / n)
    inside = (s >= 0.5 * math.pi) & (s <= 1.5 * math.pi)
    assert np.all(v[inside] == 0.0)
    assert np.all(v[~inside] > 0.0)
    assert v[0] == pytest.approx((0.5 * math.pi) ** 3)


def test_point_potential_is_circular_distance_power():
    v = point_vanishing_potential(2.0, n=64)
    assert v[32] == pytest.approx(0.0, abs=1e-20)
    assert v[0] == pytest.approx(math.pi**2)
    assert v[1] == pytest.approx(v[63])


@pytest.mark.parametrize(
    "build",
    [
        lambda: constant_potential(0.0, 16),
        lambda: point_vanishing_potential(0.0, n=16),
        lambda: interval_vanishing_potential(-1.0, n=16),
        lambda: interval_vanishing_potential(2.0, a=3.0, b=2.0, n=16),
    ],
)
def test_fixture_domain_errors(build):
    with pytest.raises(DomainError):
        build()


def test_grid_size_resolves_the_wavelength():
    settings = ResolventSettings(grid_size=256)
    assert grid_size_for(0.0, 2 * math.pi, settings) == 256
    assert grid_size_for(-50.0, 2 * math.pi, settings) == 256
    assert grid_size_for(1e6, 2 * math.pi, settings) == 40000


def test_grid_size_resolves_the_boundary_layer():
    settings = ResolventSettings(grid_size=256, layer_points=16)
    assert grid_size_for(0.0, 2 * math.pi, settings, layer=0.1) == math.ceil(16 * 2 * math.pi / 0.1)
    assert grid_size_for(0.0, 2 * math.pi, settings, layer=10.0) == 256
    with pytest.raises(DomainError):
        grid_size_for(0.0, 2 * math.pi, settings, layer=0.0)


@pytest.mark.parametrize("seed", range(5))
def test_lanczos_matches_dense_oracle_on_random_potential(seed):
    rng = np.random.default_rng(seed)
    potential = rng.uniform(0.0, 2.0, 64)
    lam = float(10 ** rng.uniform(0, 3))
    energy = float(rng.uniform(-5.0, 200.0))
    op = build_operator(potential, lam=lam, energy=energy)
    assert resolvent_norm(op, seed=seed) == pytest.approx(dense_resolvent_norm(op), rel=1e-5)


def test_first_pairing_inequality_over_random_solves(rng):
    n = 128
    families = [
        constant_potential(1.0, n),
        point_vanishing_potential(1.0, n=n),
        point_vanishing_potential(4.0, n=n),
        interval_vanishing_potential(2.0, n=n),
    ]
    violations = 0
    for trial in range(1000):
        potential = families[trial % len(families)] * rng.uniform(0.1, 10.0)
        lam = float(10 ** rng.uniform(2, 5))
        energy = float(rng.uniform(-10.0, 4.0 * n))
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        report = pairing_check(build_operator(potential, lam=lam, energy=energy), f)
        violations += not report.first_holds
    assert violations == 0


@pytest.mark.parametrize("gamma", [1.0, 2.0, 4.0])
@pytest.mark.parametrize("lam", [1e2, 1e4, 1e5])
def test_first_pairing_inequality_point_fixtures(rng, gamma, lam):
    op = build_operator(point_vanishing_potential(gamma, n=512), lam=lam, energy=float(np.sqrt(lam)))
    f = rng.standard_normal(512) + 1j * rng.standard_normal(512)
    report = pairing_check(op, f)
    assert report.first_holds
    assert report.damped_norm > 0


@pytest.mark.parametrize("gamma", [1.0, 4.0])
def test_point_fixture_norm_is_below_the_coercive_bound(gamma):
    # Re <(A - E)u, u> >= |E| |u|^2 for E < 0
    op = build_operator(point_vanishing_potential(gamma, n=256), lam=1e5, energy=-5.0)
    norm = resolvent_norm(op, seed=0)
    assert norm == pytest.approx(dense_resolvent_norm(op), rel=1e-5)
    assert norm <= 1.0 / 5.0 * (1 + 1e-6)
