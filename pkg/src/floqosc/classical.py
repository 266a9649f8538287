"""Classical trajectories of the driven oscillator pair.

Orbits are generated from the exact piecewise propagators, either once per
period (stroboscopic) or on a uniform sub-period grid.  Unstable parameter
sets grow without bound, so both generators watch for overflow and truncate
rather than emitting non-finite samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .floquet import SystemParams, stiffness_matrix
from .linalg import hamiltonian_exponential

# Largest phase-space amplitude kept in an orbit; growth past this point is
# cut off so every stored sample stays finite.
OVERFLOW_LIMIT = 1.0e300


@dataclass(frozen=True)
class PhasePoint:
    """Single phase-space sample, ordered (q1, q2, p1, p2)."""

    q1: float
    q2: float
    p1: float
    p2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.p1, self.p2])

    @classmethod
    def from_array(cls, x: np.ndarray) -> "PhasePoint":
        return cls(float(x[0]), float(x[1]), float(x[2]), float(x[3]))


DEFAULT_START = PhasePoint(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True, eq=False)
class StroboscopicOrbit:
    """Period-by-period samples; ``points[k]`` is the state after k periods.

    ``truncated_at`` is None for a complete orbit, otherwise the index of
    the last stored point before the amplitude passed ``OVERFLOW_LIMIT``.
    """

    points: np.ndarray
    truncated_at: int | None

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class DenseOrbit:
    """Sub-period sampled trajectory with matching time stamps."""

    times: np.ndarray
    points: np.ndarray
    truncated_at: int | None

    def __len__(self) -> int:
        return self.points.shape[0]


def _as_state(start: PhasePoint | np.ndarray) -> np.ndarray:
    if isinstance(start, PhasePoint):
        return start.as_array()
    x = np.asarray(start, dtype=float)
    if x.shape != (4,):
        raise ValueError(f"initial condition must have 4 components, got shape {x.shape}")
    return x


def stroboscopic_orbit(
    floquet: np.ndarray,
    start: PhasePoint | np.ndarray = DEFAULT_START,
    n_steps: int = 100,
) -> StroboscopicOrbit:
    """Iterate the one-period map ``n_steps`` times from ``start``.

    Returns n_steps + 1 points including the initial one, fewer if the
    orbit overflows first.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be non-negative, got {n_steps}")
    f = np.asarray(floquet, dtype=float)
    x = _as_state(start)
    points = [x]
    truncated_at: int | None = None
    for _ in range(n_steps):
        x = f @ x
        if np.max(np.abs(x)) > OVERFLOW_LIMIT:
            truncated_at = len(points) - 1
            break
        points.append(x)
    return StroboscopicOrbit(points=np.array(points), truncated_at=truncated_at)


def dense_orbit(
    params: SystemParams,
    start: PhasePoint | np.ndarray = DEFAULT_START,
    n_periods: int = 10,
    samples_per_period: int = 64,
) -> DenseOrbit:
    """Sample the trajectory on a uniform grid of ``samples_per_period``.

    ``samples_per_period`` must be even and at least 2 so the grid hits the
    half-period switch exactly.  Every sample is produced by a single exact
    propagator applied to the state at the most recent switch, so sub-period
    points carry no accumulated rounding relative to the stroboscopic map.
    """
    if samples_per_period < 2 or samples_per_period % 2 != 0:
        raise ValueError(
            f"samples_per_period must be even and >= 2, got {samples_per_period}"
        )
    if n_periods < 0:
        raise ValueError(f"n_periods must be non-negative, got {n_periods}")

    half_count = samples_per_period // 2
    dt = params.period / samples_per_period
    k_up = stiffness_matrix(params, +1)
    k_dn = stiffness_matrix(params, -1)
    props_up = [hamiltonian_exponential(k_up, j * dt) for j in range(1, half_count + 1)]
    props_dn = [hamiltonian_exponential(k_dn, j * dt) for j in range(1, half_count + 1)]

    anchor = _as_state(start)
    times = [0.0]
    points = [anchor]

    for n in range(n_periods):
        period_start = n * params.period
        for offset, props in ((0.0, props_up), (0.5 * params.period, props_dn)):
            # Each sample comes from one exact propagator applied to the
            # segment anchor, not from chained sub-steps.
            for j, prop in enumerate(props, start=1):
                y = prop @ anchor
                if np.max(np.abs(y)) > OVERFLOW_LIMIT:
                    return DenseOrbit(
                        times=np.array(times),
                        points=np.array(points),
                        truncated_at=len(points) - 1,
                    )
                times.append(period_start + offset + j * dt)
                points.append(y)
            anchor = points[-1]

    return DenseOrbit(times=np.array(times), points=np.array(points), truncated_at=None)
