"""Small fixed-size linear-algebra kernels for two-mode Hamiltonian flows.

Phase-space coordinates are ordered X = (q1, q2, p1, p2).  All propagators
built here are real 4x4 symplectic matrices with respect to

    J = [[0, I2], [-I2, 0]].

The kernels are closed-form (2x2 eigendecompositions, quartic root finding
by reciprocal-pair reduction) so that downstream stability classification
does not inherit iteration noise from a general-purpose eigensolver.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

# Tolerance below which a stiffness eigenvalue is treated as a flat
# (free-particle) mode; keeps the propagator continuous across k = 0.
FLAT_MODE_TOL = 1.0e-10

# Max |K - K^T| entry accepted by sym2_eigen.
SYMMETRY_TOL = 1.0e-12

# Max |F^T J F - J| entry accepted by symplectic_eigenvalues.
SYMPLECTIC_TOL = 1.0e-9

SYMPLECTIC_FORM = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)


class NonSymplecticInput(ValueError):
    """Input matrix does not preserve the symplectic form to tolerance."""


def symplectic_defect(matrix: np.ndarray) -> float:
    """Return max-entry deviation of ``M^T J M`` from ``J``."""
    m = np.asarray(matrix, dtype=float)
    return float(np.max(np.abs(m.T @ SYMPLECTIC_FORM @ m - SYMPLECTIC_FORM)))


def sym2_eigen(stiffness: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric 2x2 matrix, in closed form.

    Parameters
    ----------
    stiffness:
        Real 2x2 matrix, symmetric to within ``SYMMETRY_TOL``.

    Returns
    -------
    (values, vectors):
        ``values`` in descending order; ``vectors`` orthonormal, column i
        paired with ``values[i]``.

    Raises
    ------
    ValueError
        If the input is not 2x2 or fails the symmetry check.
    """
    k = np.asarray(stiffness, dtype=float)
    if k.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {k.shape}")
    if abs(k[0, 1] - k[1, 0]) > SYMMETRY_TOL:
        raise ValueError(
            f"matrix is not symmetric: |K01 - K10| = {abs(k[0, 1] - k[1, 0]):.3e}"
        )
    a = k[0, 0]
    b = k[1, 1]
    c = 0.5 * (k[0, 1] + k[1, 0])

    half_sum = 0.5 * (a + b)
    half_gap = 0.5 * (a - b)
    radius = math.hypot(half_gap, c)
    values = np.array([half_sum + radius, half_sum - radius])

    if radius == 0.0:
        return values, np.eye(2)

    # Component choice keeps the leading entry O(radius) even when c -> 0.
    if half_gap >= 0.0:
        v = np.array([radius + half_gap, c])
    else:
        v = np.array([c, radius - half_gap])
    v /= math.hypot(v[0], v[1])
    vectors = np.array([[v[0], -v[1]], [v[1], v[0]]])
    return values, vectors


def _mode_factors(k: float, t: float) -> tuple[float, float]:
    """Cosine-like and sine-like factors for one stiffness eigenvalue."""
    if k > FLAT_MODE_TOL:
        omega = math.sqrt(k)
        return math.cos(omega * t), math.sin(omega * t) / omega
    if k < -FLAT_MODE_TOL:
        gamma = math.sqrt(-k)
        return math.cosh(gamma * t), math.sinh(gamma * t) / gamma
    return 1.0, t


def hamiltonian_exponential(stiffness: np.ndarray, t: float) -> np.ndarray:
    """Exact flow map ``exp(t A)`` for ``A = [[0, I], [-K, 0]]``.

    ``K`` is the symmetric 2x2 stiffness of the quadratic Hamiltonian
    ``H = p.p/2 + q.K.q/2``; the result propagates X = (q1, q2, p1, p2)
    over a time ``t`` during which ``K`` is constant.

    Each stiffness eigendirection evolves as an independent 1-D mode:
    trigonometric for positive eigenvalue, hyperbolic for negative, and
    free-particle shear within ``FLAT_MODE_TOL`` of zero.
    """
    values, vectors = sym2_eigen(stiffness)
    cos_like = np.empty(2)
    sin_like = np.empty(2)
    for i, k in enumerate(values):
        cos_like[i], sin_like[i] = _mode_factors(k, t)
    # Momentum rows pick up d/dt of the position rows: -k * sin_like.
    dsin = -values * sin_like

    c_block = (vectors * cos_like) @ vectors.T
    s_block = (vectors * sin_like) @ vectors.T
    d_block = (vectors * dsin) @ vectors.T
    return np.block([[c_block, s_block], [d_block, c_block]])


def _reciprocal_pair(s: complex) -> tuple[complex, complex]:
    """Roots of ``mu^2 - s mu + 1``, returned as (large, 1/large)."""
    z = cmath.sqrt(s * s - 4.0)
    # Align the square root with s so the addition below never cancels.
    if (s.conjugate() * z).real < 0.0:
        z = -z
    big = 0.5 * (s + z)
    if big == 0.0:  # s*s == 4 handled above; unreachable except s == 0
        big = 0.5 * z
    return big, 1.0 / big


def symplectic_eigenvalues(floquet: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real 4x4 symplectic matrix, via its reciprocal quartic.

    The characteristic polynomial of a symplectic matrix is palindromic,

        p(mu) = mu^4 - c1 mu^3 + c2 mu^2 - c1 mu + 1,

    with ``c1 = tr F`` and ``c2 = (tr^2 F - tr F^2) / 2``.  Substituting
    ``s = mu + 1/mu`` reduces it to a quadratic; each root ``s`` yields an
    exactly reciprocal eigenvalue pair.  The four eigenvalues are returned
    sorted by descending modulus, ties broken by descending real part then
    descending imaginary part.

    Raises
    ------
    NonSymplecticInput
        If ``F^T J F`` deviates from ``J`` by more than ``SYMPLECTIC_TOL``.
    """
    f = np.asarray(floquet, dtype=float)
    if f.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {f.shape}")
    defect = symplectic_defect(f)
    if defect > SYMPLECTIC_TOL:
        raise NonSymplecticInput(
            f"symplectic defect {defect:.3e} exceeds {SYMPLECTIC_TOL:.1e}"
        )

    c1 = float(np.trace(f))
    c2 = 0.5 * (c1 * c1 - float(np.trace(f @ f)))

    # s^2 - c1 s + (c2 - 2) = 0
    disc = c1 * c1 - 4.0 * (c2 - 2.0)
    # A double root (two modes sharing one s, e.g. the drive switched off)
    # leaves disc at pure cancellation noise; a noise-scale negative value
    # would put a spurious ~sqrt(eps) imaginary part on s and lift |mu|
    # off the unit circle by far more than the stability tolerance.
    noise_floor = 64.0 * np.finfo(float).eps * (c1 * c1 + 4.0 * abs(c2) + 8.0)
    if -noise_floor < disc < 0.0:
        disc = 0.0
    if disc >= 0.0:
        root = math.sqrt(disc)
        if c1 >= 0.0:
            s_a = 0.5 * (c1 + root)
        else:
            s_a = 0.5 * (c1 - root)
        s_b = (c2 - 2.0) / s_a if s_a != 0.0 else 0.5 * (c1 - root)
        s_roots = (complex(s_a), complex(s_b))
    else:
        half_imag = 0.5 * math.sqrt(-disc)
        s_roots = (complex(0.5 * c1, half_imag), complex(0.5 * c1, -half_imag))

    mus: list[complex] = []
    for s in s_roots:
        mus.extend(_reciprocal_pair(s))
    mus.sort(key=lambda m: (-abs(m), -m.real, -m.imag))
    return np.array(mus, dtype=complex)
