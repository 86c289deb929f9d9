"""Discretized -d^2/ds^2 + i*lambda*V(s) - E on a circle and its resolvent norm."""

import math
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, PositiveFloat, field_validator
from scipy.linalg import svdvals
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, splu
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from app.config import ResolventSettings, config
from app.exceptions import DomainError, StagnationError
from app.logger import logger


DENSE_ORACLE_MAX_N = 512


class DiscreteDampedOperator(BaseModel):
    """Periodic second-order stencil for -u'' + (i*lambda*V - E) u with h = length / N."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    potential: np.ndarray
    length: PositiveFloat = 2 * math.pi
    lam: PositiveFloat
    energy: float = 0.0

    @field_validator("potential", mode="before")
    @classmethod
    def _check_potential(cls, v):
        samples = np.asarray(v, dtype=float)
        if samples.ndim != 1 or len(samples) < 3:
            raise DomainError("potential must be a 1-D array of at least 3 samples")
        if not np.all(np.isfinite(samples)) or np.any(samples < 0):
            raise DomainError("potential samples must be finite and nonnegative")
        if not np.any(samples > 0):
            raise DomainError("potential vanishes identically; the operator has real spectrum")
        return samples

    @property
    def n(self) -> int:
        return len(self.potential)

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    @cached_property
    def laplacian(self) -> sp.csc_matrix:
        n, h = self.n, self.h
        main = np.full(n, 2.0 / h**2)
        off = np.full(n - 1, -1.0 / h**2)
        lap = sp.diags([off, main, off], [-1, 0, 1], shape=(n, n), format="lil")
        lap[0, n - 1] = -1.0 / h**2
        lap[n - 1, 0] = -1.0 / h**2
        return lap.tocsc()

    @cached_property
    def matrix(self) -> sp.csc_matrix:
        diagonal = 1j * self.lam * self.potential - self.energy
        return (self.laplacian.astype(complex) + sp.diags(diagonal)).tocsc()

    @cached_property
    def factorization(self):
        return splu(self.matrix)

    def with_energy(self, energy: float) -> "DiscreteDampedOperator":
        return DiscreteDampedOperator(
            potential=self.potential, length=self.length, lam=self.lam, energy=energy
        )

    def solve(self, f) -> np.ndarray:
        return self.factorization.solve(np.asarray(f, dtype=complex))

    def solve_adjoint(self, f) -> np.ndarray:
        return self.factorization.solve(np.asarray(f, dtype=complex), trans="H")

    def inner(self, a, b) -> complex:
        """Discrete L^2 pairing <a, b> = h * sum a * conj(b)."""
        return complex(self.h * np.vdot(b, a))

    def norm(self, a) -> float:
        return float(math.sqrt(self.h) * np.linalg.norm(a))

    def spectrum_top(self) -> float:
        """Largest eigenvalue 4/h^2 of the discrete Laplacian."""
        return 4.0 / self.h**2


def build_operator(
    potential, length: float = 2 * math.pi, lam: float = 1.0, energy: float = 0.0
) -> DiscreteDampedOperator:
    return DiscreteDampedOperator(potential=potential, length=length, lam=lam, energy=energy)


# -- norms ---------------------------------------------------------------------


def _normal_inverse(op: DiscreteDampedOperator) -> LinearOperator:
    """x -> (A A^*)^-1 x through one forward and one adjoint solve."""
    return LinearOperator(
        (op.n, op.n),
        matvec=lambda x: op.solve(op.solve_adjoint(x)),
        dtype=complex,
    )


def _lanczos_norm(op: DiscreteDampedOperator, tol: float, max_iterations: int, rng) -> float:
    v0 = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
    try:
        top = eigsh(
            _normal_inverse(op),
            k=1,
            which="LM",
            v0=v0,
            tol=tol,
            maxiter=max_iterations,
            return_eigenvectors=False,
        )
    except ArpackNoConvergence as e:
        raise StagnationError(
            f"Lanczos stalled at lambda={op.lam:g}, E={op.energy:g} after {max_iterations} iterations"
        ) from e
    return float(math.sqrt(abs(top[0])))


def _power_norm(op: DiscreteDampedOperator, tol: float, max_iterations: int, rng) -> float:
    """Plain inverse iteration on A^* A: x <- A^-1 A^-* x, two solves per step."""
    x = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(max_iterations):
        y = op.solve(op.solve_adjoint(x))
        value = float(np.linalg.norm(y))
        x = y / value
        if estimate and abs(value - estimate) <= tol * value:
            return math.sqrt(value)
        estimate = value
    raise StagnationError(
        f"inverse iteration stalled at lambda={op.lam:g}, E={op.energy:g} "
        f"after {max_iterations} iterations"
    )


def resolvent_norm(
    op: DiscreteDampedOperator,
    settings: Optional[ResolventSettings] = None,
    tol: Optional[float] = None,
    method: str = "lanczos",
    seed: Optional[int] = None,
) -> float:
    """||(A)^-1|| = 1/sigma_min(A) in the discrete L^2 norm.

    Each iteration applies A^-* then A^-1 from a single sparse LU. A stalled
    iteration restarts from a fresh random vector up to max_restarts times.
    """
    settings = settings or config.resolvent
    tol = settings.tolerance if tol is None else tol
    rng = np.random.default_rng(config.runtime.seed if seed is None else seed)
    runner = {"lanczos": _lanczos_norm, "power": _power_norm}.get(method)
    if runner is None:
        raise DomainError(f"unknown resolvent method '{method}', expected lanczos or power")
    for attempt in Retrying(
        stop=stop_after_attempt(settings.max_restarts + 1),
        retry=retry_if_exception_type(StagnationError),
        reraise=True,
    ):
        with attempt:
            if attempt.retry_state.attempt_number > 1:
                logger.debug(
                    f"Restarting resolvent iteration (attempt {attempt.retry_state.attempt_number})"
                )
            return runner(op, tol, settings.max_iterations, rng)


def dense_resolvent_norm(op: DiscreteDampedOperator) -> float:
    """1/sigma_min from a dense SVD; the oracle for small grids."""
    if op.n > DENSE_ORACLE_MAX_N:
        raise DomainError(f"dense oracle is limited to N <= {DENSE_ORACLE_MAX_N}, got {op.n}")
    sigma = svdvals(op.matrix.toarray())
    return float(1.0 / sigma.min())


def constant_norm(c: float, lam: float, n: int, length: float = 2 * math.pi, energy: float = 0.0) -> float:
    """Circulant closed form for V = c: 1 / min_k |(4/h^2) sin^2(pi k/N) + i lam c - E|."""
    h = length / n
    k = np.arange(n)
    mu = 4.0 / h**2 * np.sin(np.pi * k / n) ** 2
    return float(1.0 / np.abs(mu + 1j * lam * c - energy).min())


# -- pairing inequalities ------------------------------------------------------


class PairingReport(BaseModel):
    """Both sides of the two pairing inequalities for one discrete solve."""

    lam: float
    energy: float
    damped_norm: float
    pairing_bound: float
    first_holds: bool
    slack: float
    gradient_norm: Optional[float] = None
    second_rhs_unit: Optional[float] = None
    second_constant: Optional[float] = None


def _check_cutoff(op: DiscreteDampedOperator, psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    if psi.shape != op.potential.shape:
        raise DomainError("cutoff must be sampled on the operator grid")
    if np.any(psi < 0) or not np.all(np.isfinite(psi)):
        raise DomainError("cutoff must be finite and nonnegative")
    undamped = op.potential <= 0
    # a one-cell neighbourhood of {V = 0}
    near = undamped | np.roll(undamped, 1) | np.roll(undamped, -1)
    if np.any(psi[near] > 0):
        raise DomainError("cutoff must vanish on a neighbourhood of {V = 0}")
    return psi


def pairing_check(
    op: DiscreteDampedOperator,
    f,
    psi=None,
    slack: float = 1e-8,
) -> PairingReport:
    """Solve A u = f and evaluate the pairing inequalities.

    The first, ||V^1/2 u|| <= lam^-1/2 |<f, u>|^1/2, is exact at the discrete
    level and is checked to relative slack. The second bounds ||psi^1/2 u'||
    by C (1 + max(0, E)^1/2) lam^-1/2 |<f, u>|^1/2 + C ||f||; its empirical
    constant C is reported.
    """
    f = np.asarray(f, dtype=complex)
    u = op.solve(f)
    pairing = abs(op.inner(f, u))
    damped = op.norm(np.sqrt(op.potential) * u)
    bound = math.sqrt(pairing / op.lam)
    report = PairingReport(
        lam=op.lam,
        energy=op.energy,
        damped_norm=damped,
        pairing_bound=bound,
        first_holds=damped <= bound * (1.0 + slack) + 1e-300,
        slack=slack,
    )
    if psi is None:
        return report
    psi = _check_cutoff(op, psi)
    du = (np.roll(u, -1) - u) / op.h
    psi_mid = 0.5 * (psi + np.roll(psi, -1))
    gradient = op.norm(np.sqrt(psi_mid) * du)
    unit = (1.0 + math.sqrt(max(0.0, op.energy))) * bound + op.norm(f)
    return report.model_copy(
        update={
            "gradient_norm": gradient,
            "second_rhs_unit": unit,
            "second_constant": gradient / unit,
        }
    )


# -- fixtures ------------------------------------------------------------------


def _grid(n: int, length: float) -> np.ndarray:
    return np.arange(n) * (length / n)


def _circular_distance(s: np.ndarray, s0: float, length: float) -> np.ndarray:
    delta = np.mod(s - s0, length)
    return np.minimum(delta, length - delta)


def constant_potential(c: float = 1.0, n: int = 4096, length: float = 2 * math.pi) -> np.ndarray:
    if not c > 0:
        raise DomainError("constant potential must be positive")
    return np.full(n, float(c))


def point_vanishing_potential(
    gamma: float, s0: float = math.pi, n: int = 4096, length: float = 2 * math.pi
) -> np.ndarray:
    """|s - s0|^gamma in circular distance."""
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    return _circular_distance(_grid(n, length), s0, length) ** gamma


def interval_vanishing_potential(
    beta: float,
    a: float = 0.5 * math.pi,
    b: float = 1.5 * math.pi,
    n: int = 4096,
    length: float = 2 * math.pi,
) -> np.ndarray:
    """dist(s, [a, b])^beta on the circle."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    if not 0 <= a < b < a + length:
        raise DomainError(f"interval [{a}, {b}] must be a proper arc")
    s = _grid(n, length)
    inside = np.mod(s - a, length) <= b - a
    mid = a + 0.5 * (b - a)
    dist = np.maximum(_circular_distance(s, mid, length) - 0.5 * (b - a), 0.0)
    return np.where(inside, 0.0, dist) ** beta


def grid_size_for(
    energy: float,
    length: float,
    settings: Optional[ResolventSettings] = None,
    layer: Optional[float] = None,
) -> int:
    """N >= max(grid_size, 20 sqrt(E) length / pi, layer_points * length / layer).

    20 points per wavelength at energy E and, when a boundary layer width is
    given, layer_points grid points across it.
    """
    settings = settings or config.resolvent
    wavelengths = 20.0 * math.sqrt(max(energy, 0.0)) * length / math.pi
    needed = max(settings.grid_size, int(math.ceil(wavelengths)))
    if layer is not None:
        if not layer > 0:
            raise DomainError(f"boundary layer width must be positive, got {layer}")
        needed = max(needed, int(math.ceil(settings.layer_points * length / layer)))
    return needed
