"""Stroboscopic quantum second moments and out-of-time-order correlators.

Both modes start in the unit-frequency vacuum, so every second moment is
1/2 at step zero.  Because the dynamics is quadratic, Heisenberg evolution
is the classical one-period map F acting on the operator vector
X = (q1, q2, p1, p2):

    <X_i^2(n)> = (1/2) sum_j (F^n)_ij^2

and commutators with the initial operators are c-numbers, giving squared
commutator growth directly from single matrix entries of F^n.

Unstable parameter sets make F^n overflow double precision within a few
thousand periods, so powers are carried as a renormalized matrix plus a
running log scale, and series values are handed out as (mantissa,
log_scale) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .floquet import STABILITY_TOL
from .linalg import symplectic_eigenvalues


class NotUnstable(ValueError):
    """Operation requires a growing mode but the map is marginal/stable."""


class DegenerateEigenvector(ArithmeticError):
    """Dominant eigenvector has no usable position-1 component."""


class InsufficientData(ValueError):
    """Fit window holds too few usable points."""


# Unit-norm eigenvector component below which a quadrature ratio is refused.
EIGENVECTOR_TOL = 1.0e-12


@dataclass(frozen=True)
class LogScaled:
    """Non-negative number stored as mantissa * exp(log_scale)."""

    mantissa: float
    log_scale: float

    @property
    def log(self) -> float:
        """Natural log of the value; -inf for an exact zero."""
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(self.mantissa) + self.log_scale

    @property
    def value(self) -> float:
        """Plain float value; inf once past double-precision range."""
        if self.mantissa == 0.0:
            return 0.0
        log_value = self.log
        if log_value > 709.0:
            return math.inf
        return self.mantissa * math.exp(self.log_scale)


@dataclass(frozen=True)
class MomentRecord:
    """Second moments after n periods, plus the momentum/position ratio."""

    n: int
    q1_sq: LogScaled
    q2_sq: LogScaled
    p1_sq: LogScaled
    p2_sq: LogScaled
    ratio: float


@dataclass(frozen=True)
class OtocRecord:
    """Squared commutators |[q1(n), q1(0)]|^2 and |[p1(n), q1(0)]|^2."""

    n: int
    c_qq: LogScaled
    c_pq: LogScaled


def _scaled_powers(floquet: np.ndarray, n_max: int) -> Iterator[tuple[int, np.ndarray, float]]:
    """Yield (n, G, sigma) with F^n = G * exp(sigma), max|G| = 1 for n >= 1."""
    f = np.asarray(floquet, dtype=float)
    if f.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {f.shape}")
    g = np.eye(4)
    sigma = 0.0
    yield 0, g, sigma
    for n in range(1, n_max + 1):
        g = f @ g
        scale = float(np.max(np.abs(g)))
        g = g / scale
        sigma += math.log(scale)
        yield n, g, sigma


def _moment_record(n: int, g: np.ndarray, sigma: float) -> MomentRecord:
    row_sq = 0.5 * np.sum(g * g, axis=1)
    log_scale = 2.0 * sigma
    return MomentRecord(
        n=n,
        q1_sq=LogScaled(float(row_sq[0]), log_scale),
        q2_sq=LogScaled(float(row_sq[1]), log_scale),
        p1_sq=LogScaled(float(row_sq[2]), log_scale),
        p2_sq=LogScaled(float(row_sq[3]), log_scale),
        ratio=float(row_sq[2] / row_sq[0]),
    )


def second_moments(floquet: np.ndarray, n_max: int) -> list[MomentRecord]:
    """Vacuum second moments for n = 0..n_max periods."""
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    return [_moment_record(n, g, sigma) for n, g, sigma in _scaled_powers(floquet, n_max)]


def moment_ratio(floquet: np.ndarray, n: int) -> float:
    """<p1^2(n)> / <q1^2(n)>; scale-free, safe at any n."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    for step, g, sigma in _scaled_powers(floquet, n):
        if step == n:
            return _moment_record(step, g, sigma).ratio
    raise AssertionError("unreachable")


def otoc_series(floquet: np.ndarray, n_max: int) -> list[OtocRecord]:
    """Squared commutator series for n = 0..n_max periods.

    For the quadratic Hamiltonian, [X_i(n), X_j(0)] = i (F^n J)_ij is a
    c-number, so the squared magnitudes reduce to single matrix entries:
    position-position (F^n)_13^2 and momentum-position (F^n)_33^2.  They
    are exactly 0 and 1 at n = 0.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    records = []
    for n, g, sigma in _scaled_powers(floquet, n_max):
        log_scale = 2.0 * sigma
        records.append(
            OtocRecord(
                n=n,
                c_qq=LogScaled(float(g[0, 2]) ** 2, log_scale),
                c_pq=LogScaled(float(g[2, 2]) ** 2, log_scale),
            )
        )
    return records


def effective_frequency(floquet: np.ndarray) -> float:
    """Squeezing-axis frequency selected by the dominant growing mode.

    The late-time moment ratio <p1^2>/<q1^2> converges to the squared
    momentum/position component ratio of the leading eigenvector v of the
    one-period map; this returns omega_eff = |v_p1| / |v_q1|.  The vector
    is found by inverse iteration seeded with the leading eigenvalue.

    Raises
    ------
    NotUnstable
        If the map has no eigenvalue off the unit circle.
    DegenerateEigenvector
        If the leading eigenvector has (numerically) no q1 component.
    """
    f = np.asarray(floquet, dtype=float)
    eigenvalues = symplectic_eigenvalues(f)
    mu = complex(eigenvalues[0])
    if math.log(abs(mu)) <= STABILITY_TOL:
        raise NotUnstable(f"leading eigenvalue modulus {abs(mu):.12f} is not above 1")

    ident = np.eye(4, dtype=complex)
    vec = np.full(4, 0.5, dtype=complex)
    shift = mu
    for _ in range(3):
        try:
            nxt = np.linalg.solve(f - shift * ident, vec)
        except np.linalg.LinAlgError:
            # Exactly singular shift: nudge off the eigenvalue and retry.
            shift = mu * (1.0 + 1.0e-12) + 1.0e-300
            nxt = np.linalg.solve(f - shift * ident, vec)
        vec = nxt / np.linalg.norm(nxt)

    if abs(vec[0]) < EIGENVECTOR_TOL:
        raise DegenerateEigenvector(
            f"|v_q1| = {abs(vec[0]):.3e} below {EIGENVECTOR_TOL:.1e}"
        )
    return float(abs(vec[2]) / abs(vec[0]))


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares line through (n, log value)."""

    slope: float
    intercept: float
    residual_rms: float
    n_points: int


def fit_growth_rate(
    series: Sequence[tuple[int, float]],
    window: tuple[int, int] | None = None,
) -> GrowthFit:
    """Fit log-value growth per period over a window of steps.

    Parameters
    ----------
    series:
        (n, log_value) pairs; typically built from ``LogScaled.log``.
    window:
        Inclusive (n_lo, n_hi) bounds on the step index.  None keeps the
        last three quarters of the series, dropping the transient.

    Raises
    ------
    InsufficientData
        If fewer than 10 points fall in the window, or any of them has a
        non-finite log value.
    """
    if window is None:
        kept = list(series)[len(series) // 4 :]
    else:
        n_lo, n_hi = window
        kept = [(n, y) for n, y in series if n_lo <= n <= n_hi]
    if len(kept) < 10:
        raise InsufficientData(f"window holds {len(kept)} points, need at least 10")
    steps = np.array([n for n, _ in kept], dtype=float)
    logs = np.array([y for _, y in kept], dtype=float)
    if not np.all(np.isfinite(logs)):
        raise InsufficientData("window contains non-finite log values")

    slope, intercept = np.polyfit(steps, logs, 1)
    residuals = logs - (slope * steps + intercept)
    return GrowthFit(
        slope=float(slope),
        intercept=float(intercept),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        n_points=len(kept),
    )
