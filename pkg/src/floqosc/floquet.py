"""Floquet map and stability analysis for two coupled oscillators.

One oscillator has a square-wave modulated frequency: nu(t) = 1 + eps on the
first half of each period, 1 - eps on the second half (units of the static
oscillator frequency).  The other has fixed frequency ``alpha`` and couples
bilinearly with strength ``coupling``.  The one-period propagator is the
product of the two constant-stiffness half-period flows, which is exact:
there is no time-stepping error anywhere in this module.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import hamiltonian_exponential, symplectic_eigenvalues

# A Lyapunov exponent at or below this is treated as exactly marginal.
STABILITY_TOL = 1.0e-9

# Relative imaginary part above which the leading eigenvalue counts as complex.
COMPLEX_TOL = 1.0e-9


class InvalidRange(ValueError):
    """Scan range is empty or inverted."""


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless parameters of the driven pair.

    epsilon:  modulation depth of the driven oscillator, 0 <= epsilon < 1
    period:   drive period, in units of the static oscillator's 1/omega_0
    coupling: bilinear coupling strength (Lambda / m omega_0^2)
    alpha:    static oscillator frequency ratio omega_1 / omega_0
    """

    epsilon: float
    period: float
    coupling: float
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if not self.period > 0.0:
            raise ValueError(f"period must be positive, got {self.period}")
        if not math.isfinite(self.coupling):
            raise ValueError(f"coupling must be finite, got {self.coupling}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


class Regime(enum.Enum):
    """Stability class of the one-period map."""

    STABLE = "stable"
    UNSTABLE_REAL = "unstable_real"
    UNSTABLE_COMPLEX = "unstable_complex"


@dataclass(frozen=True, eq=False)
class FloquetData:
    """One-period map together with its spectral summary."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    mu_max: complex
    lyapunov: float
    regime: Regime


@dataclass(frozen=True)
class ScanPoint:
    epsilon: float
    period: float
    lyapunov: float
    regime: Regime


def stiffness_matrix(params: SystemParams, sign: int) -> np.ndarray:
    """Stiffness K of the active half-period; ``sign`` +1 first, -1 second."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    nu = 1.0 + sign * params.epsilon
    return np.array(
        [
            [params.alpha**2, params.coupling],
            [params.coupling, nu**2],
        ]
    )


def floquet_matrix(params: SystemParams) -> np.ndarray:
    """One-period propagator: raised-frequency half first, then lowered."""
    half = 0.5 * params.period
    flow_up = hamiltonian_exponential(stiffness_matrix(params, +1), half)
    flow_down = hamiltonian_exponential(stiffness_matrix(params, -1), half)
    return flow_down @ flow_up


def single_oscillator_floquet(epsilon: float, period: float) -> np.ndarray:
    """Closed-form 2x2 one-period map of the driven oscillator alone.

    Acts on (q, p) of the modulated oscillator with the coupling removed.
    Used as an independent oracle for the coupled map at zero coupling.
    """
    nu_up = 1.0 + epsilon
    nu_dn = 1.0 - epsilon
    cu = math.cos(0.5 * nu_up * period)
    su = math.sin(0.5 * nu_up * period)
    cd = math.cos(0.5 * nu_dn * period)
    sd = math.sin(0.5 * nu_dn * period)
    return np.array(
        [
            [cd * cu - (nu_up / nu_dn) * sd * su, su * cd / nu_up + sd * cu / nu_dn],
            [-nu_up * su * cd - nu_dn * sd * cu, cu * cd - (nu_dn / nu_up) * su * sd],
        ]
    )


def instability_condition_single(epsilon: float, period: float) -> bool:
    """Whether the uncoupled driven oscillator is parametrically unstable.

    Equivalent to |tr F| > 2 for the 2x2 one-period map, reduced to

        |cos(T) - eps^2 cos(eps T)| > 1 - eps^2.
    """
    return abs(math.cos(period) - epsilon**2 * math.cos(epsilon * period)) > 1.0 - epsilon**2


def single_oscillator_exponent(epsilon: float, period: float) -> float:
    """Lyapunov exponent per period of the uncoupled driven oscillator."""
    half_trace = 0.5 * abs(float(np.trace(single_oscillator_floquet(epsilon, period))))
    if half_trace <= 1.0:
        return 0.0
    return math.acosh(half_trace)


def analyze(params: SystemParams) -> FloquetData:
    """Build the one-period map and classify its stability.

    The Lyapunov exponent per period is log of the leading eigenvalue
    modulus, clamped at zero (the spectrum is reciprocal, so the exact
    value cannot be negative; rounding can land a hair below).
    """
    matrix = floquet_matrix(params)
    eigenvalues = symplectic_eigenvalues(matrix)
    mu_max = complex(eigenvalues[0])
    lyapunov = max(math.log(abs(mu_max)), 0.0)
    if lyapunov <= STABILITY_TOL:
        regime = Regime.STABLE
    elif abs(mu_max.imag) > COMPLEX_TOL * abs(mu_max):
        regime = Regime.UNSTABLE_COMPLEX
    else:
        regime = Regime.UNSTABLE_REAL
    return FloquetData(
        matrix=matrix,
        eigenvalues=eigenvalues,
        mu_max=mu_max,
        lyapunov=lyapunov,
        regime=regime,
    )


def _scan_cell(epsilon: float, period: float, coupling: float, alpha: float) -> ScanPoint:
    data = analyze(SystemParams(epsilon=epsilon, period=period, coupling=coupling, alpha=alpha))
    # Marginal cells are stored as exact zeros so stability boundaries
    # extracted from scan output do not wiggle at rounding scale.
    lyap = 0.0 if data.regime is Regime.STABLE else data.lyapunov
    return ScanPoint(epsilon=epsilon, period=period, lyapunov=lyap, regime=data.regime)


def stability_scan(
    epsilon_range: tuple[float, float],
    period_range: tuple[float, float],
    grid: tuple[int, int],
    coupling: float,
    alpha: float = 1.0,
    threads: int = 1,
) -> list[ScanPoint]:
    """Classify a rectangular (epsilon, period) grid.

    Rows are ordered epsilon-major with period varying fastest.  Grid edges
    are included; a size-1 axis collapses to its lower edge.  ``threads``
    splits the work across a thread pool without affecting the output.

    Raises
    ------
    InvalidRange
        If either axis has fewer than one point or an inverted range.
    """
    (eps_lo, eps_hi) = epsilon_range
    (per_lo, per_hi) = period_range
    n_eps, n_per = grid
    if n_eps < 1 or n_per < 1:
        raise InvalidRange(f"grid must be at least 1x1, got {n_eps}x{n_per}")
    if eps_hi < eps_lo:
        raise InvalidRange(f"epsilon range is inverted: [{eps_lo}, {eps_hi}]")
    if per_hi < per_lo:
        raise InvalidRange(f"period range is inverted: [{per_lo}, {per_hi}]")

    eps_values = np.linspace(eps_lo, eps_hi, n_eps)
    per_values = np.linspace(per_lo, per_hi, n_per)
    cells = [(float(e), float(t)) for e in eps_values for t in per_values]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: _scan_cell(c[0], c[1], coupling, alpha), cells))
    return [_scan_cell(e, t, coupling, alpha) for e, t in cells]
