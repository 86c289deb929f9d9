import math

import numpy as np
import pytest

from app.analysis.quadrature import (
    c0_exact_limit,
    c0_integral,
    c0_lhs,
    c0_scaling,
    gauss_kronrod,
    integrate,
    integrate_batch,
)
from app.exceptions import ConvergenceError, DomainError


def test_kronrod_is_exact_for_polynomials():
    value, error = gauss_kronrod(lambda x: x**10, 0.0, 1.0)
    assert value[0] == pytest.approx(1.0 / 11.0, rel=1e-14)
    assert error[0] < 1e-6


def test_integrate_smooth_and_singular():
    value, _ = integrate(np.sin, 0.0, math.pi)
    assert value == pytest.approx(2.0, rel=1e-12)
    value, _ = integrate(np.sqrt, 0.0, 1.0, rtol=1e-12, max_rounds=60)
    assert value == pytest.approx(2.0 / 3.0, rel=1e-10)
    value, _ = integrate(np.abs, -1.0, 2.0, breakpoints=[0.0])
    assert value == pytest.approx(2.5, rel=1e-14)


def test_batch_integrals_are_independent():
    result = integrate_batch(
        lambda ids, x: x ** ids.astype(float),
        lows=[0.0, 0.0, 0.0, 0.5],
        highs=[1.0, 1.0, 0.5, 1.0],
        owners=[0, 1, 2, 2],
        count=3,
    )
    assert result.values == pytest.approx([1.0, 0.5, 1.0 / 3.0])


def test_batch_reports_non_convergence():
    with pytest.raises(ConvergenceError, match="did not converge"):
        integrate_batch(
            lambda ids, x: np.where(x > 1.0 / 3.0, 1.0, 0.0),
            [0.0],
            [1.0],
            [0],
            1,
            rtol=1e-15,
            max_rounds=2,
        )


@pytest.mark.parametrize("eta, beta", [(2.0, 9.0), (1.0, 9.0), (0.5, 2.0), (4.0, 2.0), (1.0, 0.0)])
def test_c0_at_one_matches_the_beta_function(eta, beta):
    assert c0_integral(eta, beta, 1.0) == pytest.approx(c0_exact_limit(eta, beta), rel=1e-10)


def test_c0_closed_forms():
    assert c0_integral(1.0, 1.0, 0.5) == pytest.approx(0.75)
    assert c0_integral(2.0, 0.0, 0.25) == pytest.approx(1.0)
    assert c0_integral(2.0, 9.0, 0.0) == 0.0


def test_c0_is_increasing_in_epsilon():
    values = [c0_integral(2.0, 9.0, eps) for eps in (0.1, 0.3, 0.6, 1.0)]
    assert values == sorted(values)


def test_c0_scaling_law_holds_across_scales():
    ks = [1.0, 10.0, 1e3]
    ratios = c0_scaling(2.0, 9.0, 0.5, ks)
    assert ratios == pytest.approx(np.full(3, c0_integral(2.0, 9.0, 0.5)), rel=1e-8)
    assert c0_lhs(1.0, 2.0, 0.5, 4.0) == pytest.approx(4.0**3 * c0_integral(1.0, 2.0, 0.5), rel=1e-10)


@pytest.mark.parametrize(
    "args",
    [(0.0, 9.0, 0.5), (2.0, -1.0, 0.5), (2.0, 9.0, 1.5), (2.0, 9.0, -0.1)],
)
def test_c0_domain(args):
    with pytest.raises(DomainError):
        c0_integral(*args)


def test_c0_lhs_needs_a_positive_scale():
    with pytest.raises(DomainError):
        c0_lhs(2.0, 9.0, 0.5, 0.0)
