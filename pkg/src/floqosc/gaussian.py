"""Gaussian wavepacket evolution and single-mode thermalization diagnostics.

The two-mode wavefunction is kept in the form

    Psi(q1, q2) = N exp(-(a q1^2 + b q2^2 + 2 c q1 q2) / 2),

with complex width parameters collected in the symmetric matrix
Omega = [[a, c], [c, b]].  The Schroedinger equation closes on Omega as a
matrix Riccati flow, i dOmega/dt = Omega^2 - K(t), solved two ways: exactly,
by linearizing through the same half-period propagators as the classical
map, and by direct RK4 stepping as an independent cross-check.

Late in an unstable run Re(Omega) converges to a rank-deficient matrix
with O(1) entries: det Re(Omega) shrinks like exp(-2 mu_L n) while its two
products stay O(1), so forming it from the stored parameters cancels to
noise after a few dozen e-foldings.  The norm bookkeeping therefore rides
along with the evolution: log |N| obeys an exact per-period update through
the linearization determinant, and everything downstream that needs the
vanishing determinant (reduced-state gap, purity, effective temperature)
is reconstructed from the carried log |N|, which never cancels.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .floquet import SystemParams, stiffness_matrix
from .linalg import hamiltonian_exponential

# RK4 parameter magnitude beyond which a step is refused outright.
STEP_MAGNITUDE_LIMIT = 1.0e150

# Thermal-form acceptance: Re(chi)/eta may undershoot 1 by this much and
# still count as a saturated (beta = 0) kernel.
THERMAL_FORM_TOL = 1.0e-9

_LOG_PI = math.log(math.pi)


class NonNormalizable(ValueError):
    """Gaussian parameters do not describe a normalizable state."""


class SingularLinearization(ArithmeticError):
    """Position block of the Riccati linearization lost invertibility."""


class StepRejected(ArithmeticError):
    """RK4 parameter magnitude exceeded the safety limit."""


class NotThermalForm(ValueError):
    """Reduced kernel lies outside the thermal family; no temperature."""


class TemperatureUndefined(ValueError):
    """Reduced kernel has no coherence; the state is pure (beta infinite)."""


@dataclass(frozen=True)
class GaussianPureState:
    """Width parameters (a, b, c) of a normalized two-mode Gaussian.

    ``log_norm`` is log |N|.  Left unset, it is filled from the closed-form
    normalization, which requires Re(Omega) positive definite.  The
    integrators pass it explicitly (exact per-period bookkeeping for the
    linearized flow, norm-ODE quadrature for RK4) because late-time states
    hold the determinant information only there, not in (a, b, c).
    """

    a: complex
    b: complex
    c: complex
    log_norm: float | None = None

    def __post_init__(self) -> None:
        if not (self.a.real > 0.0 and self.b.real > 0.0):
            raise NonNormalizable(
                f"Re a = {self.a.real:.3e} and Re b = {self.b.real:.3e} "
                "must both be positive"
            )
        if self.log_norm is None:
            object.__setattr__(self, "log_norm", log_normalization(self))
        elif not math.isfinite(self.log_norm):
            raise NonNormalizable(f"log_norm must be finite, got {self.log_norm}")

    @property
    def omega(self) -> np.ndarray:
        return np.array([[self.a, self.c], [self.c, self.b]])


def initial_state(alpha: float = 1.0) -> GaussianPureState:
    """Ground state of the two oscillators with the drive and coupling off."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return GaussianPureState(a=complex(alpha), b=complex(1.0), c=complex(0.0))


def log_normalization(state: GaussianPureState) -> float:
    """log |N| fixed by unit norm: |N|^2 = sqrt(det Re Omega) / pi.

    Computed directly from the width parameters, so it is only as good as
    det Re(Omega) formed in double precision; use the state's carried
    ``log_norm`` for late-time unstable states.
    """
    det_re = state.a.real * state.b.real - state.c.real**2
    if det_re <= 0.0:
        raise NonNormalizable(f"det Re(Omega) = {det_re:.3e} is not positive")
    return 0.25 * math.log(det_re) - 0.5 * _LOG_PI


@dataclass
class RiccatiPair:
    """Linearization (position_block; momentum_block) of the Riccati flow.

    Omega = -i momentum_block @ position_block^{-1} is invariant under
    joint column rescaling; applied rescales are accumulated so the true
    |det position_block| stays available for the norm update
    log |N(T)| = log |N(0)| - log |det position_block| / 2.
    """

    position_block: np.ndarray
    momentum_block: np.ndarray
    log_rescale_sum: float = 0.0

    @classmethod
    def from_state(cls, state: GaussianPureState) -> "RiccatiPair":
        return cls(
            position_block=np.eye(2, dtype=complex),
            momentum_block=1j * state.omega.astype(complex),
        )

    def advance(self, flow: np.ndarray) -> None:
        """Apply a 4x4 phase-space propagator to the stacked pair."""
        nb = flow[:2, :2] @ self.position_block + flow[:2, 2:] @ self.momentum_block
        mb = flow[2:, :2] @ self.position_block + flow[2:, 2:] @ self.momentum_block
        self.position_block = nb
        self.momentum_block = mb

    def rescale(self) -> None:
        """Divide each column pair by its largest entry; Omega unchanged."""
        for j in range(2):
            scale = max(
                float(np.max(np.abs(self.position_block[:, j]))),
                float(np.max(np.abs(self.momentum_block[:, j]))),
            )
            if scale > 0.0:
                self.position_block[:, j] /= scale
                self.momentum_block[:, j] /= scale
                self.log_rescale_sum += math.log(scale)

    def _position_det(self) -> complex:
        nb = self.position_block
        return nb[0, 0] * nb[1, 1] - nb[0, 1] * nb[1, 0]

    def log_abs_position_det(self) -> float:
        """log |det position_block| including all applied rescales."""
        det = self._position_det()
        if det == 0.0 or not cmath.isfinite(det):
            raise SingularLinearization(
                f"det of position block is {det}; cannot recover Omega"
            )
        return math.log(abs(det)) + self.log_rescale_sum

    def extract_omega(self) -> np.ndarray:
        nb = self.position_block
        det = self._position_det()
        if det == 0.0 or not cmath.isfinite(det):
            raise SingularLinearization(
                f"det of position block is {det}; cannot recover Omega"
            )
        inv = np.array([[nb[1, 1], -nb[0, 1]], [-nb[1, 0], nb[0, 0]]]) / det
        omega = -1j * (self.momentum_block @ inv)
        # Exact flow keeps Omega symmetric; rounding does not.
        off = 0.5 * (omega[0, 1] + omega[1, 0])
        omega[0, 1] = off
        omega[1, 0] = off
        return omega


def evolve_exact(
    state: GaussianPureState,
    params: SystemParams,
    n_periods: int,
) -> list[GaussianPureState]:
    """Stroboscopic width-parameter evolution through the exact propagators.

    The Riccati flow shares its generator with the classical equations of
    motion, so each half period is one application of the corresponding
    constant-stiffness propagator to the linearization pair.  The pair is
    re-anchored at (I, i Omega) every period, which keeps its entries O(1)
    at any horizon, and log |N| is advanced by the exact determinant
    identity at the same time.

    Returns n_periods + 1 states, the input first.
    """
    if n_periods < 0:
        raise ValueError(f"n_periods must be non-negative, got {n_periods}")
    half = 0.5 * params.period
    flow_up = hamiltonian_exponential(stiffness_matrix(params, +1), half)
    flow_down = hamiltonian_exponential(stiffness_matrix(params, -1), half)

    states = [state]
    current = state
    for _ in range(n_periods):
        pair = RiccatiPair.from_state(current)
        pair.advance(flow_up)
        pair.rescale()
        pair.advance(flow_down)
        omega = pair.extract_omega()
        log_norm = current.log_norm - 0.5 * pair.log_abs_position_det()
        current = GaussianPureState(
            a=complex(omega[0, 0]),
            b=complex(omega[1, 1]),
            c=complex(omega[0, 1]),
            log_norm=log_norm,
        )
        states.append(current)
    return states


def _parameter_velocity(y: np.ndarray, alpha_sq: float, nu_sq: float, lam: float) -> np.ndarray:
    a, b, c = y[0], y[1], y[2]
    return np.array(
        [
            -1j * (a * a + c * c - alpha_sq),
            -1j * (b * b + c * c - nu_sq),
            -1j * (c * (a + b) - lam),
            -0.5j * (a + b),  # d(log N)/dt, quadrature of the norm ODE
        ]
    )


def evolve_rk4(
    state: GaussianPureState,
    params: SystemParams,
    n_periods: int,
    steps_per_period: int = 1000,
) -> list[GaussianPureState]:
    """Stroboscopic width-parameter evolution by direct RK4 stepping.

    Independent of ``evolve_exact``: integrates the scalar Riccati system

        i da/dt = a^2 + c^2 - alpha^2
        i db/dt = b^2 + c^2 - nu^2(t)
        i dc/dt = c (a + b) - coupling

    with the square-wave nu^2 switched between half periods.  Steps never
    straddle the switch (``steps_per_period`` must be even, and at least
    100 to be anywhere near the exact propagator).  log |N| comes from the
    norm ODE integrated alongside.

    Raises
    ------
    StepRejected
        If any width parameter magnitude passes ``STEP_MAGNITUDE_LIMIT``.
    """
    states, _ = _rk4_run(state, params, n_periods, steps_per_period, probe_norm=False)
    return states


def norm_quadrature_gap(
    state: GaussianPureState,
    params: SystemParams,
    n_periods: int,
    steps_per_period: int = 1000,
) -> float:
    """Worst gap between integrated and closed-form log |N| along an RK4 run.

    A consistency probe of the norm ODE against the normalization
    integral, limited by the step error of the trajectory itself; keep the
    horizon where exp(-2 mu_L n) stays above the integrator's h^4 noise or
    the closed form being probed is itself unresolved.
    """
    _, drift = _rk4_run(state, params, n_periods, steps_per_period, probe_norm=True)
    return drift


def _rk4_run(
    state: GaussianPureState,
    params: SystemParams,
    n_periods: int,
    steps_per_period: int,
    probe_norm: bool,
) -> tuple[list[GaussianPureState], float]:
    if n_periods < 0:
        raise ValueError(f"n_periods must be non-negative, got {n_periods}")
    if steps_per_period < 100 or steps_per_period % 2 != 0:
        raise ValueError(
            f"steps_per_period must be even and >= 100, got {steps_per_period}"
        )

    alpha_sq = params.alpha**2
    lam = params.coupling
    nu_sq_up = (1.0 + params.epsilon) ** 2
    nu_sq_dn = (1.0 - params.epsilon) ** 2
    half_steps = steps_per_period // 2
    h = params.period / steps_per_period

    y = np.array([state.a, state.b, state.c, complex(state.log_norm)], dtype=complex)
    states = [state]
    worst_drift = 0.0
    for _ in range(n_periods):
        for nu_sq in (nu_sq_up, nu_sq_dn):
            for _ in range(half_steps):
                k1 = _parameter_velocity(y, alpha_sq, nu_sq, lam)
                k2 = _parameter_velocity(y + 0.5 * h * k1, alpha_sq, nu_sq, lam)
                k3 = _parameter_velocity(y + 0.5 * h * k2, alpha_sq, nu_sq, lam)
                k4 = _parameter_velocity(y + h * k3, alpha_sq, nu_sq, lam)
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                top = float(np.max(np.abs(y[:3])))
                if not math.isfinite(top) or top > STEP_MAGNITUDE_LIMIT:
                    raise StepRejected(
                        f"width parameter magnitude {top:.3e} exceeds "
                        f"{STEP_MAGNITUDE_LIMIT:.1e}"
                    )
        current = GaussianPureState(
            a=complex(y[0]),
            b=complex(y[1]),
            c=complex(y[2]),
            log_norm=float(y[3].real),
        )
        if probe_norm:
            worst_drift = max(
                worst_drift, abs(y[3].real - log_normalization(current))
            )
        states.append(current)
    return states, worst_drift


@dataclass(frozen=True)
class ReducedGaussianDM:
    """Gaussian kernel of the static mode after tracing out the driven one.

        rho(x, x') propto exp(-(chi x^2 + conj(chi) x'^2 - 2 eta x x') / 2)

    mu is the traced mode's diagonal width 2 Re(b); eta >= 0 measures the
    decoherence acquired through entanglement.  log_kernel_gap carries
    log(Re(chi) - eta): the quantity itself underflows and its direct
    difference cancels in the near-maximally-mixed tail, while every
    physical readout (position variance, purity, temperature) hinges on
    it.  -inf is allowed and means a fully saturated kernel.
    """

    mu: float
    eta: float
    chi: complex
    log_kernel_gap: float

    def __post_init__(self) -> None:
        if not self.mu > 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.eta < 0.0:
            raise ValueError(f"eta must be non-negative, got {self.eta}")
        if math.isnan(self.log_kernel_gap) or self.log_kernel_gap == math.inf:
            raise ValueError(f"log_kernel_gap must be finite or -inf, got {self.log_kernel_gap}")

    @property
    def kernel_gap(self) -> float:
        """Re(chi) - eta; underflows to 0.0 deep in the saturated tail."""
        return math.exp(self.log_kernel_gap)

    @property
    def thermal_ratio(self) -> float:
        """eta / Re(chi), in [0, 1] for any normalizable kernel."""
        if self.eta == 0.0:
            return 0.0
        return self.eta / (self.eta + self.kernel_gap)

    @property
    def q1_variance(self) -> float:
        """<q1^2> of the reduced state: 1 / (2 (Re(chi) - eta))."""
        return 0.5 * math.exp(-self.log_kernel_gap)


def reduced_density_matrix(state: GaussianPureState) -> ReducedGaussianDM:
    """Trace out the modulated mode of a pure two-mode Gaussian.

    The kernel gap Re(chi) - eta equals det Re(Omega) / Re(b), rebuilt
    here from the carried normalization (det Re(Omega) = pi^2 |N|^4) so it
    survives arbitrarily deep into the unstable tail.
    """
    mu = 2.0 * state.b.real
    eta = abs(state.c) ** 2 / mu
    chi = state.a - state.c**2 / mu
    log_gap = 4.0 * state.log_norm + 2.0 * _LOG_PI - math.log(state.b.real)
    return ReducedGaussianDM(mu=mu, eta=eta, chi=chi, log_kernel_gap=log_gap)


def linear_entropy(dm: ReducedGaussianDM, log_norm: float) -> float:
    """S_lin = 1 - Tr rho^2 for the reduced Gaussian kernel.

    The trace of the squared kernel is a two-dimensional Gaussian integral
    with closed form

        Tr rho^2 = 2 pi^2 |N|^4 / (mu sqrt(Re(chi)^2 - eta^2)),

    evaluated in log space; the difference of squares splits into
    (Re(chi) - eta) (Re(chi) + eta) so the tail keeps its leading digits.
    """
    log_second = math.log(dm.kernel_gap + 2.0 * dm.eta)
    log_tr = (
        4.0 * log_norm
        + math.log(2.0 * math.pi**2)
        - math.log(dm.mu)
        - 0.5 * (dm.log_kernel_gap + log_second)
    )
    return max(0.0, -math.expm1(log_tr))


@dataclass(frozen=True)
class BetaEstimate:
    """Inverse temperature plus how far the kernel is from thermal form."""

    beta: float
    thermal_residual: float


def effective_beta(dm: ReducedGaussianDM, omega_eff: float) -> BetaEstimate:
    """Match the reduced kernel to a thermal state at frequency omega_eff.

    A thermal oscillator kernel satisfies cosh(beta omega) = Re(chi)/eta,
    so beta = arccosh(Re(chi)/eta) / omega_eff.  The residual |Im chi|/|chi|
    reports how far the kernel actually is from the (real) thermal family;
    it is not used to reject, only reported.

    Raises
    ------
    TemperatureUndefined
        If eta = 0 (pure reduced state, beta would be infinite).
    NotThermalForm
        If Re(chi)/eta < 1 - THERMAL_FORM_TOL, which no thermal kernel can
        reach.  No clamping below that; within the tolerance the kernel
        counts as saturated and beta = 0 is returned.
    """
    if not omega_eff > 0.0:
        raise ValueError(f"omega_eff must be positive, got {omega_eff}")
    if dm.eta == 0.0:
        raise TemperatureUndefined("eta = 0: reduced state is pure")
    # Sign test on the directly-formed ratio: only a genuinely non-thermal
    # kernel lands below -tolerance; tail cancellation noise cannot.
    if (dm.chi.real - dm.eta) / dm.eta < -THERMAL_FORM_TOL:
        raise NotThermalForm(
            f"Re(chi)/eta = {dm.chi.real / dm.eta:.12f} lies below the thermal bound"
        )
    # Value from the carried gap: delta = Re(chi)/eta - 1 without cancellation.
    delta = dm.kernel_gap / dm.eta
    # arccosh(1 + delta), written to stay exact for tiny delta.
    beta = math.log1p(delta + math.sqrt(delta * (2.0 + delta))) / omega_eff
    return BetaEstimate(
        beta=beta, thermal_residual=abs(dm.chi.imag) / abs(dm.chi)
    )
