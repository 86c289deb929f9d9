"""Leapfrog solver for u_tt - Laplace(u) + W u_t = 0 on the unit torus.

The damping is centered in time, so the scheme is explicit and the
staggered energy below is exactly conserved for W = 0 and nonincreasing for
W >= 0. Traces are for qualitative comparison of damping geometries only;
the asymptotic polynomial rates show up at times far beyond desk scale.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from app.config import SimulationSettings, config
from app.exceptions import DomainError, InstabilityError
from app.geometry.field import WeightField
from app.geometry.torus import DirectionFrame
from app.logger import logger


Damping = Union[WeightField, np.ndarray, float]


class WaveState(BaseModel):
    """u at the current and previous time levels on an N x N periodic grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    u: np.ndarray
    u_prev: np.ndarray
    time: float = 0.0
    dt: float
    steps: int = 0

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def velocity(self) -> np.ndarray:
        """Staggered u_t at time - dt/2."""
        return (self.u - self.u_prev) / self.dt


class InitialData(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    u0: np.ndarray
    v0: np.ndarray
    description: str


class EnergyTrace(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    label: str
    initial: str
    grid_size: int
    dt: float
    times: np.ndarray
    energies: np.ndarray

    @property
    def final_ratio(self) -> float:
        return float(self.energies[-1] / self.energies[0]) if self.energies[0] > 0 else 0.0

    @property
    def max_increase(self) -> float:
        """Largest step-to-step energy increase relative to E(0)."""
        if len(self.energies) < 2 or self.energies[0] == 0:
            return 0.0
        return float(np.max(np.diff(self.energies)) / self.energies[0])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"label": self.label, "t": self.times, "energy": self.energies})


def grid_points(n: int) -> np.ndarray:
    axis = np.arange(n) / n
    return np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1)


def laplacian(u: np.ndarray, h: float) -> np.ndarray:
    return (
        np.roll(u, 1, 0) + np.roll(u, -1, 0) + np.roll(u, 1, 1) + np.roll(u, -1, 1) - 4.0 * u
    ) / (h * h)


def sample_damping(damping: Damping, n: int) -> np.ndarray:
    """W on the grid from a field, an N x N array or a constant."""
    if isinstance(damping, WeightField):
        grid = damping.evaluate(grid_points(n).reshape(-1, 2)).reshape(n, n)
    elif np.isscalar(damping):
        grid = np.full((n, n), float(damping))
    else:
        grid = np.asarray(damping, dtype=float)
        if grid.shape != (n, n):
            raise DomainError(f"damping grid must be {n} x {n}, got {grid.shape}")
    if np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise DomainError("damping must be finite and nonnegative")
    return grid


def stable_dt(n: int, cfl: float) -> float:
    if not 0 < cfl <= 1:
        raise DomainError(f"CFL number must lie in (0, 1], got {cfl}")
    return cfl / (n * math.sqrt(2.0))


def initial_state(data: InitialData, damping: np.ndarray, dt: float) -> WaveState:
    """Second-order start: u(-dt) from Taylor expansion with u_tt = Laplace(u) - W u_t."""
    u0, v0 = data.u0, data.v0
    n = u0.shape[0]
    if dt > 1.0 / (n * math.sqrt(2.0)) * (1 + 1e-12):
        raise DomainError(f"dt={dt:g} violates the CFL bound h/sqrt(2)={1.0 / (n * math.sqrt(2.0)):g}")
    acceleration = laplacian(u0, 1.0 / n) - damping * v0
    u_prev = u0 - dt * v0 + 0.5 * dt * dt * acceleration
    return WaveState(u=u0.copy(), u_prev=u_prev, dt=dt)


def step(state: WaveState, damping: np.ndarray) -> WaveState:
    """u+ = [2u - (1 - W dt/2) u- + dt^2 Laplace(u)] / (1 + W dt/2)."""
    dt = state.dt
    half = 0.5 * dt * damping
    u_next = (2.0 * state.u - (1.0 - half) * state.u_prev + dt * dt * laplacian(state.u, state.h)) / (
        1.0 + half
    )
    return WaveState(u=u_next, u_prev=state.u, time=state.time + dt, dt=dt, steps=state.steps + 1)


def energy(state: WaveState) -> float:
    """1/2 [ |(u - u_prev)/dt|^2 + <grad u, grad u_prev> ] with forward differences."""
    h = state.h
    u, w = state.u, state.u_prev
    kinetic = np.sum(state.velocity**2)
    gx = np.sum((np.roll(u, -1, 0) - u) * (np.roll(w, -1, 0) - w))
    gy = np.sum((np.roll(u, -1, 1) - u) * (np.roll(w, -1, 1) - w))
    return float(0.5 * h * h * (kinetic + (gx + gy) / (h * h)))


def run(
    damping: Damping,
    data: InitialData,
    final_time: Optional[float] = None,
    label: str = "field",
    settings: Optional[SimulationSettings] = None,
) -> EnergyTrace:
    settings = settings or config.simulation
    n = data.u0.shape[0]
    final_time = settings.final_time if final_time is None else final_time
    w = sample_damping(damping, n)
    if settings.damping_peak is not None and w.max() > 0:
        logger.debug(f"{label}: rescaling W from max {w.max():.4g} to {settings.damping_peak:g}")
        w = w * (settings.damping_peak / w.max())
    dt = stable_dt(n, settings.cfl)
    state = initial_state(data, w, dt)
    reference = max(float(np.abs(state.u).max()), 1e-300)
    total = int(math.ceil(final_time / dt))
    times, energies = [0.0], [energy(state)]
    for k in range(1, total + 1):
        state = step(state, w)
        if k % settings.record_every == 0 or k == total:
            peak = float(np.abs(state.u).max())
            if not math.isfinite(peak) or peak > settings.growth_limit * reference:
                raise InstabilityError(
                    f"{label}: field grew {peak / reference:.3g}x by t={state.time:.4g} "
                    f"(step {k}, dt={dt:.3g}, N={n})"
                )
            times.append(state.time)
            energies.append(energy(state))
    logger.info(f"{label}: E({times[-1]:.3g}) / E(0) = {energies[-1] / max(energies[0], 1e-300):.4g}")
    return EnergyTrace(
        label=label,
        initial=data.description,
        grid_size=n,
        dt=dt,
        times=np.asarray(times),
        energies=np.asarray(energies),
    )


def run_comparison(
    fields: Dict[str, Damping],
    data: InitialData,
    final_time: Optional[float] = None,
    settings: Optional[SimulationSettings] = None,
) -> List[EnergyTrace]:
    """Energy traces for several dampings from the same initial data."""
    threads = config.runtime.threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(run, damping, data, final_time, label, settings)
            for label, damping in fields.items()
        ]
        return [f.result() for f in futures]


def run_beams(
    damping: Damping,
    beams: Dict[str, InitialData],
    final_time: Optional[float] = None,
    settings: Optional[SimulationSettings] = None,
) -> List[EnergyTrace]:
    """Energy traces for several initial data under one damping."""
    threads = config.runtime.threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(run, damping, data, final_time, label, settings) for label, data in beams.items()
        ]
        return [f.result() for f in futures]


def beam_separation(slow: EnergyTrace, fast: EnergyTrace) -> float:
    """E_slow(T)/E_slow(0) over E_fast(T)/E_fast(0)."""
    if fast.final_ratio <= 0:
        return math.inf
    return slow.final_ratio / fast.final_ratio


def deepest_offset(damping: Damping, frame: DirectionFrame, n: int) -> float:
    """Transverse offset of the line through the grid maximum of W."""
    w = sample_damping(damping, n)
    i, j = np.unravel_index(int(np.argmax(w)), w.shape)
    s, _ = frame.st_coordinates(np.array([i / n, j / n]))
    return float(s)


def gaussian_beam(
    frame: DirectionFrame,
    s_offset: float,
    n: int,
    width: Optional[float] = None,
    harmonic: int = 4,
) -> InitialData:
    """Gaussian in s, oscillating and travelling along the direction of the frame.

    u0 = G(s) cos(2 pi m z.(p, q)) and v0 = -unit.grad(u0), so the beam moves
    along the geodesic at offset s_offset. Both are periodic on the torus.
    """
    width = 8.0 / n if width is None else width
    if not width > 0:
        raise DomainError("beam width must be positive")
    v = frame.direction
    z = grid_points(n)
    s = z @ v.perp
    gap = frame.s_distance(s, s_offset)
    envelope = np.exp(-0.5 * (gap / width) ** 2)
    phase = 2.0 * math.pi * harmonic * (z @ np.array([v.p, v.q], dtype=float))
    u0 = envelope * np.cos(phase)
    v0 = envelope * 2.0 * math.pi * harmonic * v.period * np.sin(phase)
    return InitialData(
        u0=u0, v0=v0, description=f"beam {v} s={s_offset:.6g} width={width:.4g} m={harmonic}"
    )


def plane_wave(k: Tuple[int, int], n: int) -> InitialData:
    """u = sin(2 pi k.z - omega t) with omega = 2 pi |k|."""
    kv = np.asarray(k, dtype=float)
    if not kv.any():
        raise DomainError("plane wave needs a nonzero wave vector")
    omega = 2.0 * math.pi * float(np.linalg.norm(kv))
    phase = 2.0 * math.pi * (grid_points(n) @ kv)
    return InitialData(
        u0=np.sin(phase), v0=-omega * np.cos(phase), description=f"plane wave k={tuple(k)}"
    )


def discrete_frequency(k: Tuple[int, int], n: int, dt: float) -> float:
    """Frequency of mode k under the leapfrog scheme: sin(omega dt/2) = (dt/2) sqrt(mu_k)."""
    h = 1.0 / n
    mu = sum((2.0 / h * math.sin(math.pi * ki * h)) ** 2 for ki in k)
    return 2.0 / dt * math.asin(min(1.0, 0.5 * dt * math.sqrt(mu)))


def mode_energy(k: Tuple[int, int]) -> float:
    """Energy of sin(2 pi k.z - omega t) on the unit torus with omega = 2 pi |k|."""
    kk = (2.0 * math.pi) ** 2 * float(np.dot(k, k))
    return 0.5 * kk
