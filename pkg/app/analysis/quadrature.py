"""Vectorized adaptive Gauss-Kronrod quadrature and the c0 scaling integral."""

import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import quad

from app.exceptions import ConvergenceError, DomainError


# 15-point Kronrod nodes on [0, 1] mirrored to [-1, 1]; the 7-point Gauss rule uses every other node
_XK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)
NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS[7] = _WG[3]

# integrand(owner ids, abscissae) -> values, all 1-D arrays of equal length
BatchIntegrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


class BatchQuadrature(BaseModel):
    """Values and error bounds of a batch of integrals."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    errors: np.ndarray
    intervals: np.ndarray
    rounds: int


def gauss_kronrod(f: Callable[[np.ndarray], np.ndarray], a, b) -> Tuple[np.ndarray, np.ndarray]:
    """G7/K15 pair on each [a_i, b_i]: (Kronrod value, |Kronrod - Gauss|)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    kronrod = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    return kronrod, np.abs(kronrod - gauss)


def integrate_batch(
    integrand: BatchIntegrand,
    lows: Sequence[float],
    highs: Sequence[float],
    owners: Sequence[int],
    count: int,
    rtol: float = 1e-10,
    atol: float = 0.0,
    max_rounds: int = 40,
    describe: Optional[Callable[[int], str]] = None,
) -> BatchQuadrature:
    """Adaptive G7/K15 for `count` integrals, each the sum over its initial pieces.

    Piece i contributes to integral owners[i]. Each round bisects, for every
    unconverged integral, the pieces carrying more than their share of the
    error budget max(atol, rtol * |value|).
    """
    lo = np.asarray(lows, dtype=float)
    hi = np.asarray(highs, dtype=float)
    own = np.asarray(owners, dtype=int)
    values = np.zeros(count)
    errors = np.zeros(count)
    if not len(lo):
        return BatchQuadrature(values=values, errors=errors, intervals=np.zeros(count), rounds=0)

    def evaluate(lo, hi, own):
        ids = np.repeat(own, len(NODES))
        return gauss_kronrod(lambda x: integrand(ids, x), lo, hi)

    piece_val, piece_err = evaluate(lo, hi, own)
    for rounds in range(max_rounds + 1):
        values = np.bincount(own, weights=piece_val, minlength=count)
        errors = np.bincount(own, weights=piece_err, minlength=count)
        budget = np.maximum(atol, rtol * np.abs(values))
        open_ids = errors > budget
        if not open_ids.any():
            break
        if rounds == max_rounds:
            worst = int(np.argmax(errors / np.maximum(budget, 1e-300)))
            where = describe(worst) if describe else f"integral #{worst}"
            raise ConvergenceError(
                f"adaptive quadrature did not converge after {max_rounds} rounds; "
                f"worst at {where}: value {values[worst]:.6g}, error {errors[worst]:.3g}"
            )
        pieces = np.bincount(own, minlength=count)
        share = budget[own] / np.maximum(pieces[own], 1)
        split = open_ids[own] & (piece_err > share)
        # the worst piece of every open integral always splits
        order = np.lexsort((-piece_err, own))
        first = order[np.r_[True, own[order][1:] != own[order][:-1]]]
        split[first[open_ids[own[first]]]] = True
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_own = np.concatenate([own[split], own[split]])
        new_val, new_err = evaluate(new_lo, new_hi, new_own)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        own = np.concatenate([own[keep], new_own])
        piece_val = np.concatenate([piece_val[keep], new_val])
        piece_err = np.concatenate([piece_err[keep], new_err])

    return BatchQuadrature(
        values=values,
        errors=errors,
        intervals=np.bincount(own, minlength=count).astype(float),
        rounds=rounds,
    )


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rtol: float = 1e-10,
    atol: float = 0.0,
    breakpoints: Optional[Sequence[float]] = None,
    max_rounds: int = 40,
) -> Tuple[float, float]:
    """Adaptive integral of a vectorized f over [a, b], split at the breakpoints."""
    cuts = np.unique(np.clip(np.concatenate([[a, b], [] if breakpoints is None else breakpoints]), a, b))
    result = integrate_batch(
        lambda _, x: f(x),
        cuts[:-1],
        cuts[1:],
        np.zeros(len(cuts) - 1, dtype=int),
        1,
        rtol=rtol,
        atol=atol,
        max_rounds=max_rounds,
    )
    return float(result.values[0]), float(result.errors[0])


def _check_c0_arguments(eta: float, beta: float) -> None:
    if not eta > 0:
        raise DomainError(f"order eta must be positive, got {eta}")
    if beta < 0:
        raise DomainError(f"exponent beta must be nonnegative, got {beta}")


def c0_integral(eta: float, beta: float, epsilon: float, rtol: float = 1e-13) -> float:
    """c0(eps) = (2/eta) * int_0^eps (1 - t)^beta t^(1/eta - 1) dt.

    With u = t^(1/eta) the integrand loses its endpoint singularity:
    c0(eps) = 2 * int_0^(eps^(1/eta)) (1 - u^eta)^beta du.
    """
    _check_c0_arguments(eta, beta)
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    if epsilon == 0.0:
        return 0.0
    top = epsilon ** (1.0 / eta)
    value, _ = integrate(
        lambda u: np.maximum(1.0 - u**eta, 0.0) ** beta, 0.0, top, rtol=rtol, max_rounds=60
    )
    return 2.0 * value


def c0_lhs(eta: float, beta: float, epsilon: float, k: float) -> float:
    """Direct quadrature of int_{|t|^eta <= eps k} (k - |t|^eta)^beta dt.

    Evaluated with scipy's QUADPACK in the original variable, so it is an
    independent check on c0_integral: the ratio to k^(beta + 1/eta) is c0(eps).
    """
    _check_c0_arguments(eta, beta)
    if not k > 0:
        raise DomainError(f"scale k must be positive, got {k}")
    top = (epsilon * k) ** (1.0 / eta)
    if top == 0.0:
        return 0.0
    value, _ = quad(
        lambda t: max(k - t**eta, 0.0) ** beta,
        0.0,
        top,
        epsabs=0.0,
        epsrel=1e-13,
        limit=500,
    )
    return 2.0 * value


def c0_scaling(eta: float, beta: float, epsilon: float, ks: Sequence[float]) -> np.ndarray:
    """c0_lhs(k) / k^(beta + 1/eta) for each k; constant when the scaling law holds."""
    power = beta + 1.0 / eta
    return np.array([c0_lhs(eta, beta, epsilon, k) / k**power for k in ks])


def c0_exact_limit(eta: float, beta: float) -> float:
    """c0(1) = (2/eta) B(1/eta, beta + 1) in closed form."""
    _check_c0_arguments(eta, beta)
    log_beta = math.lgamma(1.0 / eta) + math.lgamma(beta + 1.0) - math.lgamma(1.0 / eta + beta + 1.0)
    return 2.0 / eta * math.exp(log_beta)
