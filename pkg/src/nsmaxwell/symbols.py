"""Per-mode generators of the linearized system.

At frequency xi the linearized dynamics block-diagonalizes into

* a 5x5 fluid generator over (n, u1, u2, u3, sigma) acting on longitudinal
  velocity data, where the electric coupling has been folded in through
  div E = -n (the i xi / |xi|^2 entry, singular at xi = 0), and
* a 9x9 electromagnetic generator over (u, E, B) restricted to the
  transverse subspace {xi . u = xi . E = xi . B = 0}.

Rotation equivariance reduces both to 3x3 systems at xi = r e1: the
longitudinal triple (n, v, sigma) with v = unit(xi) . u, and one transverse
polarization triple (u_p, E_p, B_q) per polarization.  The full matrices
remain the reference path for cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ModelParams


@dataclass
class FluidSymbol:
    matrix: np.ndarray  # (5, 5) complex
    xi: np.ndarray


@dataclass
class EMSymbol:
    matrix: np.ndarray  # (9, 9) complex
    xi: np.ndarray


def _cross_matrix(xi):
    x1, x2, x3 = xi
    return np.array([[0.0, -x3, x2], [x3, 0.0, -x1], [-x2, x1, 0.0]])


def _check_stable(M: np.ndarray, what: str):
    eigs = np.linalg.eigvals(M)
    limit = 1e-10 * (1.0 + np.abs(M).max())
    worst = float(eigs.real.max())
    if worst > limit:
        raise ValueError(f"{what} has an eigenvalue with real part {worst:.3e} > 0")


def build_fluid_symbol(xi, params: ModelParams, check: bool = True) -> FluidSymbol:
    """5x5 generator of (n, u, sigma) with the electric restoring term.

    Requires xi != 0 (the 1/|xi|^2 electric entry is singular at the origin).
    """
    xi = np.asarray(xi, dtype=float)
    r2 = float(xi @ xi)
    if r2 == 0.0:
        raise ValueError("fluid symbol is singular at xi = 0")
    a1, a2, a3 = params.alpha1, params.alpha2, params.alpha3
    mu, mup, kb = params.mu, params.mu_prime, params.kappa_bar
    A = np.zeros((5, 5), dtype=complex)
    A[0, 1:4] = -1j * xi
    A[1:4, 0] = -1j * xi * (a1 + 1.0 / r2)
    A[1:4, 1:4] = -mu * r2 * np.eye(3) - (mu + mup) * np.outer(xi, xi)
    A[1:4, 4] = -1j * xi * a2
    A[4, 1:4] = -1j * xi * a3
    A[4, 4] = -kb * r2
    if check:
        _check_stable(A, f"fluid symbol at xi={xi}")
    return FluidSymbol(matrix=A, xi=xi)


def build_em_symbol(xi, params: ModelParams, check: bool = True) -> EMSymbol:
    """9x9 generator of (u, E, B): u' = -E - mu |xi|^2 u, E' = i xi x B + u,
    B' = -i xi x E."""
    xi = np.asarray(xi, dtype=float)
    r2 = float(xi @ xi)
    mu = params.mu
    cross = 1j * _cross_matrix(xi)
    I3 = np.eye(3)
    M = np.zeros((9, 9), dtype=complex)
    M[0:3, 0:3] = -mu * r2 * I3
    M[0:3, 3:6] = -I3
    M[3:6, 0:3] = I3
    M[3:6, 6:9] = cross
    M[6:9, 3:6] = -cross
    if check:
        _check_stable(M, f"EM symbol at xi={xi}")
    return EMSymbol(matrix=M, xi=xi)


def full_linear_generator(xi, params: ModelParams) -> np.ndarray:
    """11x11 generator of the unsplit linearized system over (n, u, sigma, E, B).

    Valid at every xi including 0; the div E = -n constraint is an invariant
    of this matrix, not an ingredient of it.
    """
    xi = np.asarray(xi, dtype=float)
    a1, a2, a3 = params.alpha1, params.alpha2, params.alpha3
    mu, mup, kb = params.mu, params.mu_prime, params.kappa_bar
    r2 = float(xi @ xi)
    cross = 1j * _cross_matrix(xi)
    I3 = np.eye(3)
    A = np.zeros((11, 11), dtype=complex)
    A[0, 1:4] = -1j * xi
    A[1:4, 0] = -1j * xi * a1
    A[1:4, 1:4] = -mu * r2 * I3 - (mu + mup) * np.outer(xi, xi)
    A[1:4, 4] = -1j * xi * a2
    A[1:4, 5:8] = -I3
    A[4, 1:4] = -1j * xi * a3
    A[4, 4] = -kb * r2
    A[5:8, 1:4] = I3
    A[5:8, 8:11] = cross
    A[8:11, 5:8] = -cross
    return A


def full_generator_batch(xi: np.ndarray, params: ModelParams) -> np.ndarray:
    """Vectorized :func:`full_linear_generator` for xi of shape (m, 3)."""
    xi = np.asarray(xi, dtype=float)
    m = xi.shape[0]
    a1, a2, a3 = params.alpha1, params.alpha2, params.alpha3
    mu, mup, kb = params.mu, params.mu_prime, params.kappa_bar
    r2 = np.einsum("mi,mi->m", xi, xi)
    A = np.zeros((m, 11, 11), dtype=complex)
    A[:, 0, 1:4] = -1j * xi
    A[:, 1:4, 0] = -1j * xi * a1
    for i in range(3):
        A[:, 1 + i, 1 + i] = -mu * r2
        for j in range(3):
            A[:, 1 + i, 1 + j] -= (mu + mup) * xi[:, i] * xi[:, j]
    A[:, 1:4, 4] = -1j * xi * a2
    A[:, 1, 5] = A[:, 2, 6] = A[:, 3, 7] = -1.0
    A[:, 4, 1:4] = -1j * xi * a3
    A[:, 4, 4] = -kb * r2
    A[:, 5, 1] = A[:, 6, 2] = A[:, 7, 3] = 1.0
    x1, x2, x3 = xi[:, 0], xi[:, 1], xi[:, 2]
    # E' += i xi x B
    A[:, 5, 9], A[:, 5, 10] = -1j * x3, 1j * x2
    A[:, 6, 8], A[:, 6, 10] = 1j * x3, -1j * x1
    A[:, 7, 8], A[:, 7, 9] = -1j * x2, 1j * x1
    # B' = -i xi x E
    A[:, 8, 6], A[:, 8, 7] = 1j * x3, -1j * x2
    A[:, 9, 5], A[:, 9, 7] = -1j * x3, 1j * x1
    A[:, 10, 5], A[:, 10, 6] = 1j * x2, -1j * x1
    return A


def fluid_symbol_radial(r, params: ModelParams) -> np.ndarray:
    """Reduced longitudinal 3x3 generator over (n, v, sigma) at |xi| = r.

    Broadcasts over an array of radii, returning shape r.shape + (3, 3).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radial fluid symbol requires r > 0")
    a1, a2, a3 = params.alpha1, params.alpha2, params.alpha3
    nu = 2.0 * params.mu + params.mu_prime
    kb = params.kappa_bar
    A = np.zeros(r.shape + (3, 3), dtype=complex)
    A[..., 0, 1] = -1j * r
    A[..., 1, 0] = -1j * (a1 * r + 1.0 / r)
    A[..., 1, 1] = -nu * r**2
    A[..., 1, 2] = -1j * a2 * r
    A[..., 2, 1] = -1j * a3 * r
    A[..., 2, 2] = -kb * r**2
    return A


def em_symbol_radial(r, params: ModelParams, orientation: int = -1) -> np.ndarray:
    """Reduced transverse 3x3 generator over one polarization triple at |xi| = r.

    ``orientation=-1`` reproduces the (u2, E2, B3) triple at xi = r e1; the
    opposite sign gives the (u3, E3, B2) triple.  Both have conjugate
    dynamics, hence identical moduli for real initial amplitudes.
    """
    r = np.asarray(r, dtype=float)
    s = 1j * orientation
    A = np.zeros(r.shape + (3, 3), dtype=complex)
    A[..., 0, 0] = -params.mu * r**2
    A[..., 0, 1] = -1.0
    A[..., 1, 0] = 1.0
    A[..., 1, 2] = s * r
    A[..., 2, 1] = s * r
    return A


def fluid_radial_char_coeffs(r, params: ModelParams):
    """Characteristic polynomial coefficients of the reduced longitudinal system.

    Returns (1, c2, c1, c0) with p(z) = z^3 + c2 z^2 + c1 z + c0; an
    analytic cross-check for eigenvalue computations.
    """
    a1, a2, a3 = params.alpha1, params.alpha2, params.alpha3
    nu = 2.0 * params.mu + params.mu_prime
    kb = params.kappa_bar
    r = np.asarray(r, dtype=float)
    c2 = (nu + kb) * r**2
    c1 = nu * kb * r**4 + (a2 * a3 + a1) * r**2 + 1.0
    c0 = kb * r**2 * (a1 * r**2 + 1.0)
    return 1.0, c2, c1, c0


def em_radial_char_coeffs(r, params: ModelParams):
    """Characteristic polynomial of the reduced transverse system:
    z^3 + mu r^2 z^2 + (1 + r^2) z + mu r^4."""
    r = np.asarray(r, dtype=float)
    mu = params.mu
    return 1.0, mu * r**2, 1.0 + r**2, mu * r**4
