"""Slow, independent reference implementations used to certify fast paths.

Nothing here shares derivative formation or exponential algorithms with the
production code: the matrix exponential is replaced by adaptive embedded
Runge-Kutta integration, spectral derivatives by second-order centered
finite differences, and Gauss-Legendre quadrature by doubling trapezoid
sums.  These implementations favour obviousness over speed and are only
ever imported from tests and audit runs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .params import ModelParams, pressure_partials
from .state import StateVector
from .spectral import to_physical_real


class StiffnessError(RuntimeError):
    """Adaptive step size underflowed; the problem is too stiff for the oracle."""


# ---------------------------------------------------------------------------
# adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) for v' = A v

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                   187 / 2100, 1 / 40])


def expm_ode_oracle(A, t, v, rtol: float = 1e-12, atol: float = 1e-14,
                    max_steps: int = 2_000_000) -> np.ndarray:
    """Integrate v' = A v from 0 to t with an embedded 5(4) pair."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    A = np.asarray(A, dtype=complex)
    y = np.asarray(v, dtype=complex).copy()
    if t == 0:
        return y
    span = float(t)
    scaleA = max(float(np.max(np.abs(A))), 1e-30)
    h = min(span, 0.1 / scaleA)
    h_min = span * 1e-15
    s = 0.0
    ks = [None] * 7
    for _ in range(max_steps):
        if s >= span:
            return y
        h = min(h, span - s)
        ks[0] = A @ y
        for i in range(1, 7):
            yi = y + h * sum(aij * ks[j] for j, aij in enumerate(_DP_A[i]))
            ks[i] = A @ yi
        y5 = y + h * sum(b * ks[j] for j, b in enumerate(_DP_B5) if b != 0.0)
        y4 = y + h * sum(b * ks[j] for j, b in enumerate(_DP_B4) if b != 0.0)
        tol = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = np.sqrt(np.mean((np.abs(y5 - y4) / tol) ** 2))
        if err <= 1.0:
            s += h
            y = y5
        factor = 0.9 * err ** (-0.2) if err > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))
        if h < h_min:
            raise StiffnessError(
                f"step size underflow at s={s:.3e} (h={h:.3e}); matrix too stiff"
            )
    raise StiffnessError(f"step budget of {max_steps} exhausted before t={t}")


# ---------------------------------------------------------------------------
# finite-difference evaluation of the full right-hand side

def _fd_ops(n: int, dx: float):
    def d(axis):
        def op(f):
            return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2 * dx)
        return op

    def lap(f):
        out = -6.0 * f
        for axis in range(f.ndim - 3, f.ndim):
            out = out + np.roll(f, -1, axis=axis) + np.roll(f, 1, axis=axis)
        return out / dx**2

    d1, d2, d3 = d(-3), d(-2), d(-1)

    def grad(f):
        return np.stack([d1(f), d2(f), d3(f)])

    def div(v):
        return d1(v[0]) + d2(v[1]) + d3(v[2])

    def curl(v):
        return np.stack([
            d2(v[2]) - d3(v[1]),
            d3(v[0]) - d1(v[2]),
            d1(v[1]) - d2(v[0]),
        ])

    return grad, div, curl, lap


def fd_rhs_oracle(U: StateVector, params: ModelParams) -> np.ndarray:
    """Physical-space right-hand side with every derivative a centered difference.

    Returns a real array shaped (11, n, n, n).  Restricted to grids of at
    most 32^3 points; this path is O(h^2) accurate by construction and is
    compared against the spectral right-hand side in convergence studies.
    """
    g = U.grid
    if g.resolution > 32:
        raise ValueError("finite-difference oracle is limited to resolution <= 32")
    grad, div, curl, lap = _fd_ops(g.resolution, g.box_length / g.resolution)
    phys = to_physical_real(g, U.data)
    n, u, sig, E, B = phys[0], phys[1:4], phys[4], phys[5:8], phys[8:11]

    a1, a2, a3 = params.alpha1, params.alpha2, params.alpha3
    mu, mup, kb, cnu = params.mu, params.mu_prime, params.kappa_bar, params.c_nu
    rho = n + 1.0
    theta = sig + 1.0
    _, p_rho, p_theta = pressure_partials(rho, theta, params)

    grad_n = grad(n)
    grad_s = grad(sig)
    du = np.stack([grad(u[i]) for i in range(3)])  # du[i, b] = d_b u_i
    div_u = div(u)
    grad_div_u = grad(div_u)
    lap_u = lap(u)

    u_dot_grad_u = np.einsum("bxyz,ibxyz->ixyz", u, du)
    h2 = (
        -u_dot_grad_u
        - (p_rho / rho - a1) * grad_n
        - (p_theta / rho - a2) * grad_s
        - np.cross(u, B, axis=0)
        + (mu / rho - mu) * lap_u
        + ((mu + mup) / rho - (mu + mup)) * grad_div_u
    )
    strain_sq = ((du + np.swapaxes(du, 0, 1)) ** 2).sum(axis=(0, 1))
    h3 = (
        -np.einsum("bxyz,bxyz->xyz", u, grad_s)
        - (theta * p_theta / (cnu * rho) - a3) * div_u
        + (params.kappa / (cnu * rho) - kb) * lap(sig)
        + mu / (2 * cnu * rho) * strain_sq
        + mup / (cnu * rho) * div_u**2
    )
    h4 = n * u
    h1 = -div(h4)

    out = np.empty_like(phys)
    out[0] = -div_u + h1
    out[1:4] = -a1 * grad_n - a2 * grad_s - E + mu * lap_u + (mu + mup) * grad_div_u + h2
    out[4] = -a3 * div_u + kb * lap(sig) + h3
    out[5:8] = curl(B) + u + h4
    out[8:11] = -curl(E)
    return out


# ---------------------------------------------------------------------------
# quadrature refinement

def quadrature_refinement_oracle(integrand, R: float, tol: float = 1e-9,
                                 max_doublings: int = 24) -> float:
    """Composite trapezoid on [0, R] with doubling panels until convergence."""
    m = 16
    prev = None
    for _ in range(max_doublings):
        x = np.linspace(0.0, R, m + 1)
        y = np.asarray(integrand(x), dtype=float)
        val = float(np.trapz(y, x))
        if prev is not None:
            if abs(val - prev) <= tol * max(abs(val), 1e-300):
                return val
        prev = val
        m *= 2
    raise RuntimeError(f"trapezoid refinement did not converge within {max_doublings} doublings")


# ---------------------------------------------------------------------------
# audit reports

@dataclass
class OracleReport:
    quantity: str
    fast_value: float
    oracle_value: float
    relative_deviation: float
    tolerance: float
    verdict: str

    @classmethod
    def from_values(cls, quantity, fast, oracle, tolerance):
        scale = max(abs(oracle), 1e-300)
        dev = abs(fast - oracle) / scale
        return cls(quantity, float(fast), float(oracle), float(dev), float(tolerance),
                   "pass" if dev <= tolerance else "FAIL")


def write_oracle_csv(path, reports):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["quantity", "fast_value", "oracle_value", "relative_deviation",
                    "tolerance", "verdict"])
        for r in reports:
            w.writerow([r.quantity, repr(r.fast_value), repr(r.oracle_value),
                        repr(r.relative_deviation), repr(r.tolerance), r.verdict])
