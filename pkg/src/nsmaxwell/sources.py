"""Quadratic source terms of the perturbation system.

With n = rho - 1 and sigma = theta - 1, the evolution of [n, u, sigma, E, B]
has constant-coefficient linear left-hand sides and the four nonlinear
sources evaluated here:

    h1 = -div(n u)                       (identically -div h4)
    h2 = -u.grad u
         - [P_rho(n+1, s+1)/(n+1) - alpha1] grad n
         - [P_theta(n+1, s+1)/(n+1) - alpha2] grad sigma
         - u x B
         + [mu/(n+1) - mu] lap u
         + [(mu+mu')/(n+1) - (mu+mu')] grad div u
    h3 = -u.grad sigma
         - [(s+1) P_theta(n+1, s+1) / (c_nu (n+1)) - alpha3] div u
         + [kappa/(c_nu (n+1)) - kappa_bar] lap sigma
         + mu / (2 c_nu (n+1)) |grad u + (grad u)^T|^2
         + mu' / (c_nu (n+1)) (div u)^2
    h4 = n u

Sources are evaluated pointwise in physical space from spectrally computed
derivatives; h1 is formed as the spectral divergence of h4 so the pair
(h1, h4) satisfies h1 = -div h4 to round-off, which is what keeps the
div E = -n constraint exactly conserved downstream.  The transform traffic
runs through the half-spectrum layout (fields are real); taking the real
part of each inverse transform is the Hermitian-symmetry projection after
every product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ModelParams, pressure_partials
from .spectral import (
    SpectralGrid,
    half_from_full,
    half_from_real,
    real_from_half,
)
from .state import StateVector


class SingularStateError(ValueError):
    """The density perturbation reached n <= -1 (vacuum), 1/(n+1) blows up."""


@dataclass
class PhysicalState:
    """Pointwise fields and derivatives needed by the sources.

    ``grad_u[i, b]`` holds the derivative of u_i along axis b.
    """

    n: np.ndarray
    u: np.ndarray
    sigma: np.ndarray
    B: np.ndarray
    grad_n: np.ndarray
    grad_sigma: np.ndarray
    grad_u: np.ndarray
    div_u: np.ndarray
    lap_u: np.ndarray
    lap_sigma: np.ndarray
    grad_div_u: np.ndarray


@dataclass
class SourceTerms:
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray
    h4: np.ndarray


def _physical_state_half(grid: SpectralGrid, half: np.ndarray) -> PhysicalState:
    """Inverse-transform state and derivatives from rfft-layout coefficients."""
    n = grid.resolution
    hk = grid.half_modes
    x1, x2, x3 = grid.xi_half
    xi = (x1, x2, x3)
    nh, uh, sh = half[0], half[1:4], half[4]
    div_u_hat = 1j * (x1 * uh[0] + x2 * uh[1] + x3 * uh[2])

    spect = np.empty((30, n, n, hk), dtype=complex)
    spect[0] = nh
    spect[1:4] = uh
    spect[4] = sh
    spect[5:8] = half[8:11]
    for b in range(3):
        spect[8 + b] = 1j * xi[b] * nh
        spect[11 + b] = 1j * xi[b] * sh
    for i in range(3):
        for b in range(3):
            spect[14 + 3 * i + b] = 1j * xi[b] * uh[i]
    spect[23:26] = -grid.xi_sq_half * uh
    spect[26] = -grid.xi_sq_half * sh
    for b in range(3):
        spect[27 + b] = 1j * xi[b] * div_u_hat

    phys = real_from_half(grid, spect)
    shape = phys.shape[-3:]
    du = phys[14:23].reshape(3, 3, *shape)
    return PhysicalState(
        n=phys[0], u=phys[1:4], sigma=phys[4], B=phys[5:8],
        grad_n=phys[8:11], grad_sigma=phys[11:14], grad_u=du,
        div_u=du[0, 0] + du[1, 1] + du[2, 2],
        lap_u=phys[23:26], lap_sigma=phys[26], grad_div_u=phys[27:30],
    )


def physical_state(U: StateVector) -> PhysicalState:
    return _physical_state_half(U.grid, half_from_full(U.grid, U.data))


def _pointwise_sources(ps: PhysicalState, params: ModelParams):
    """h2, h3, h4 pointwise; raises on vacuum states."""
    rho = ps.n + 1.0
    rho_min = float(np.min(rho))
    if not rho_min > 0.0:
        raise SingularStateError(
            f"density perturbation reached n + 1 = {rho_min:.3e} <= 0"
        )
    theta = ps.sigma + 1.0
    _, p_rho, p_theta = pressure_partials(rho, theta, params)
    a1, a2, a3 = params.alpha1, params.alpha2, params.alpha3
    mu, mup, cnu = params.mu, params.mu_prime, params.c_nu
    inv_rho = 1.0 / rho

    u, du = ps.u, ps.grad_u
    u_dot_grad_u = np.stack([
        u[0] * du[i, 0] + u[1] * du[i, 1] + u[2] * du[i, 2] for i in range(3)
    ])
    u_cross_B = np.cross(u, ps.B, axis=0)
    h2 = (
        -u_dot_grad_u
        - (p_rho * inv_rho - a1) * ps.grad_n
        - (p_theta * inv_rho - a2) * ps.grad_sigma
        - u_cross_B
        + (mu * inv_rho - mu) * ps.lap_u
        + ((mu + mup) * inv_rho - (mu + mup)) * ps.grad_div_u
    )

    strain_sq = np.zeros_like(ps.div_u)
    for i in range(3):
        for b in range(3):
            strain_sq += (du[i, b] + du[b, i]) ** 2
    u_dot_grad_s = u[0] * ps.grad_sigma[0] + u[1] * ps.grad_sigma[1] + u[2] * ps.grad_sigma[2]
    h3 = (
        -u_dot_grad_s
        - (theta * p_theta * inv_rho / cnu - a3) * ps.div_u
        + (params.kappa * inv_rho / cnu - params.kappa_bar) * ps.lap_sigma
        + mu / (2.0 * cnu) * inv_rho * strain_sq
        + mup / cnu * inv_rho * ps.div_u**2
    )

    h4 = ps.n * u
    return h2, h3, h4


def source_terms(U: StateVector, params: ModelParams) -> SourceTerms:
    """Evaluate the four sources in physical space.

    h1 is computed as the (spectral) divergence of h4, so h1 = -div h4 holds
    to round-off for any state.
    """
    g = U.grid
    ps = physical_state(U)
    h2, h3, h4 = _pointwise_sources(ps, params)
    x1, x2, x3 = g.xi_half
    h4_hat = half_from_real(g, h4)
    div_h4 = 1j * (x1 * h4_hat[0] + x2 * h4_hat[1] + x3 * h4_hat[2])
    h1 = real_from_half(g, -div_h4)
    return SourceTerms(h1=h1, h2=h2, h3=h3, h4=h4)


def source_increment_half(grid: SpectralGrid, half: np.ndarray, params: ModelParams,
                          dealias_fraction: float = 2.0 / 3.0,
                          min_density: float = 0.0) -> np.ndarray:
    """Spectral source increment in rfft layout, shaped like the state stack.

    Products are formed pointwise, transformed back, dealiased, and
    mean-projected (the box convention keeps every perturbation field
    zero-mean).  Layout: d/dt contributions (h1, h2, h3, h4, 0) for
    (n, u, sigma, E, B).
    """
    ps = _physical_state_half(grid, half)
    rho_min = float(np.min(ps.n)) + 1.0
    if not rho_min > min_density:
        raise SingularStateError(
            f"density guard: min(n + 1) = {rho_min:.3e} fell below {min_density:g}"
        )
    h2, h3, h4 = _pointwise_sources(ps, params)
    hats = half_from_real(grid, np.concatenate([h2, h4, h3[None]]))
    hats *= grid.dealias_mask_half(dealias_fraction)
    hats[:, 0, 0, 0] = 0.0
    out = np.zeros_like(half)
    out[1:4] = hats[0:3]
    out[5:8] = hats[3:6]
    out[4] = hats[6]
    x1, x2, x3 = grid.xi_half
    out[0] = -1j * (x1 * hats[3] + x2 * hats[4] + x3 * hats[5])
    return out


def source_term_hats(U: StateVector, params: ModelParams,
                     dealias_fraction: float = 2.0 / 3.0,
                     min_density: float = 0.0) -> np.ndarray:
    """Full-cube spectral source increment (wraps the half-spectrum path)."""
    from .spectral import full_from_half

    g = U.grid
    inc = source_increment_half(g, half_from_full(g, U.data), params,
                                dealias_fraction, min_density)
    return full_from_half(g, inc)
