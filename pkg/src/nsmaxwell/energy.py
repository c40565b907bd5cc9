"""Instant energy functionals and dissipation rates, used as run monitors.

The full functional couples the squared H^N norm of the state with three
small cross terms,

    E_N(U) = ||[n,u,sigma,E,B]||_N^2
             + k1 sum_{|a| <= N-1} <d^a u, d^a grad n>
             + k1 sum_{|a| <= N-2} <d^a curl u, d^a curl E>
             - k1 k2 sum_{1 <= |a| <= N-2} <d^a E, d^a curl B>,

its high-order variant starts the sums at 1, 1, 2 and replaces the leading
term by ||grad U||_{N-1}^2.  The dissipation rates are

    D_N   = ||grad u||_N^2 + ||n||_N^2 + ||grad sigma||_N^2
            + ||grad E||_{N-2}^2 + ||grad^2 B||_{N-3}^2
    D_N^h = ||grad^2 u||_{N-1}^2 + ||grad n||_{N-1}^2 + ||grad^2 sigma||_{N-1}^2
            + ||grad^2 E||_{N-3}^2 + ||grad^3 B||_{N-4}^2.

Desk-scale conventions for small N: an inner Sobolev order of exactly 0
keeps the plain L2 norm of the derivative; a negative order drops the term
with a warning (the estimates behind these functionals assume N >= 4).

Everything is evaluated through Plancherel with cached multi-index weights;
all inner products of real fields are real up to round-off.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralGrid, curl, gradient
from .state import StateVector


class WeightsTooLargeError(ValueError):
    """Cross-term weights broke the equivalence with the squared H^N norm."""


@dataclass(frozen=True)
class EnergyWeights:
    """Sobolev order N and the two small cross-term weights."""

    order: int = 4
    kappa1: float = 0.05
    kappa2: float = 0.5

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"energy order must be >= 1, got {self.order}")
        if not (self.kappa1 > 0 and self.kappa2 > 0):
            raise ValueError("cross-term weights must be positive")


def _range_weight(grid: SpectralGrid, lo: int, hi: int):
    """sum_{lo <= |a| <= hi} |xi^a|^2, zero when the range is empty."""
    if hi < lo:
        return None
    w = grid.sobolev_weight(hi)
    if lo > 0:
        w = w - grid.sobolev_weight(lo - 1)
    return w


def _weighted_inner(grid: SpectralGrid, w, a, b) -> float:
    if w is None:
        return 0.0
    return float(grid.volume * np.real(np.sum(w * a * np.conj(b))))


def _cross_terms(U: StateVector, weights: EnergyWeights, lo1: int, lo2: int,
                 lo3: int) -> float:
    g = U.grid
    N, k1, k2 = weights.order, weights.kappa1, weights.kappa2
    grad_n = gradient(g, U.n)
    w1 = _range_weight(g, lo1, N - 1)
    total = k1 * _weighted_inner(g, w1, U.u, grad_n)
    curl_u = curl(g, U.u)
    curl_E = curl(g, U.E)
    w2 = _range_weight(g, lo2, N - 2)
    total += k1 * _weighted_inner(g, w2, curl_u, curl_E)
    curl_B = curl(g, U.B)
    w3 = _range_weight(g, lo3, N - 2)
    total -= k1 * k2 * _weighted_inner(g, w3, U.E, curl_B)
    return total


def energy_full(U: StateVector, weights: EnergyWeights) -> float:
    """E_N(U): squared H^N norm plus the three weighted cross sums."""
    g = U.grid
    w = g.sobolev_weight(weights.order)
    base = float(g.volume * np.sum(w * np.abs(U.data) ** 2))
    return base + _cross_terms(U, weights, 0, 0, 1)


def energy_high(U: StateVector, weights: EnergyWeights) -> float:
    """E_N^h(U): gradient-level variant with the constant modes removed."""
    g = U.grid
    w = g.grad_weight(1) * g.sobolev_weight(weights.order - 1)
    base = float(g.volume * np.sum(w * np.abs(U.data) ** 2))
    return base + _cross_terms(U, weights, 1, 1, 2)


def _derivative_term(grid, coeff, grad_order: int, sobolev_order: int, label: str):
    """||grad^j f||_m^2 with the desk-scale small-N conventions."""
    if sobolev_order < 0:
        warnings.warn(
            f"dropping {label}: inner Sobolev order {sobolev_order} < 0 "
            "(functional assumes order >= 4)", stacklevel=3)
        return 0.0
    w = grid.grad_weight(grad_order) * grid.sobolev_weight(sobolev_order)
    return float(grid.volume * np.sum(w * np.abs(coeff) ** 2))


def dissipation(U: StateVector, weights: EnergyWeights) -> float:
    """D_N(U): note the density enters undifferentiated, u/sigma/E/B through
    gradients only, and the magnetic field loses two derivatives."""
    g = U.grid
    N = weights.order
    total = _derivative_term(g, U.u, 1, N, "||grad u||_N^2")
    total += float(g.volume * np.sum(g.sobolev_weight(N) * np.abs(U.n) ** 2))
    total += _derivative_term(g, U.sigma, 1, N, "||grad sigma||_N^2")
    total += _derivative_term(g, U.E, 1, N - 2, "||grad E||_(N-2)^2")
    total += _derivative_term(g, U.B, 2, N - 3, "||grad^2 B||_(N-3)^2")
    return total


def dissipation_high(U: StateVector, weights: EnergyWeights) -> float:
    g = U.grid
    N = weights.order
    total = _derivative_term(g, U.u, 2, N - 1, "||grad^2 u||_(N-1)^2")
    total += _derivative_term(g, U.n, 1, N - 1, "||grad n||_(N-1)^2")
    total += _derivative_term(g, U.sigma, 2, N - 1, "||grad^2 sigma||_(N-1)^2")
    total += _derivative_term(g, U.E, 2, N - 3, "||grad^2 E||_(N-3)^2")
    total += _derivative_term(g, U.B, 3, N - 4, "||grad^3 B||_(N-4)^2")
    return total


def squared_sobolev(U: StateVector, order: int) -> float:
    g = U.grid
    return float(g.volume * np.sum(g.sobolev_weight(order) * np.abs(U.data) ** 2))


# ---------------------------------------------------------------------------
# rfft-layout twins of the functionals: identical formulas with conjugate
# planes recovered through the plane multiplicity; the solver's per-step
# recorder uses these so monitoring does not dominate the step cost.

def _half_sum(grid, w, mult, arr) -> float:
    if w is None:
        return 0.0
    return float(grid.volume * np.sum(mult * w * np.abs(arr) ** 2))


def _half_inner(grid, w, mult, a, b) -> float:
    if w is None:
        return 0.0
    return float(grid.volume * np.real(np.sum(mult * w * a * np.conj(b))))


def _half_cross_terms(grid, half, weights: EnergyWeights, lo1, lo2, lo3) -> float:
    N, k1, k2 = weights.order, weights.kappa1, weights.kappa2
    mult = grid.plane_multiplicity()
    x1, x2, x3 = grid.xi_half
    u, E, B, nh = half[1:4], half[5:8], half[8:11], half[0]
    grad_n = np.stack([1j * x1 * nh, 1j * x2 * nh, 1j * x3 * nh])

    def curl_h(v):
        return np.stack([
            1j * (x2 * v[2] - x3 * v[1]),
            1j * (x3 * v[0] - x1 * v[2]),
            1j * (x1 * v[1] - x2 * v[0]),
        ])

    def w_range(lo, hi):
        if hi < lo:
            return None
        w = grid.sobolev_weight_half(hi)
        return w - grid.sobolev_weight_half(lo - 1) if lo > 0 else w

    total = k1 * _half_inner(grid, w_range(lo1, N - 1), mult, u, grad_n)
    total += k1 * _half_inner(grid, w_range(lo2, N - 2), mult, curl_h(u), curl_h(E))
    total -= k1 * k2 * _half_inner(grid, w_range(lo3, N - 2), mult, E, curl_h(B))
    return total


def energy_full_half(grid, half, weights: EnergyWeights) -> float:
    mult = grid.plane_multiplicity()
    base = _half_sum(grid, grid.sobolev_weight_half(weights.order), mult, half)
    return base + _half_cross_terms(grid, half, weights, 0, 0, 1)


def dissipation_half(grid, half, weights: EnergyWeights) -> float:
    mult = grid.plane_multiplicity()
    N = weights.order

    def term(arr, grad_order, sob_order, label):
        if sob_order < 0:
            warnings.warn(
                f"dropping {label}: inner Sobolev order {sob_order} < 0 "
                "(functional assumes order >= 4)", stacklevel=2)
            return 0.0
        w = grid.grad_weight_half(grad_order) * grid.sobolev_weight_half(sob_order)
        return _half_sum(grid, w, mult, arr)

    total = term(half[1:4], 1, N, "||grad u||_N^2")
    total += _half_sum(grid, grid.sobolev_weight_half(N), mult, half[0])
    total += term(half[4], 1, N, "||grad sigma||_N^2")
    total += term(half[5:8], 1, N - 2, "||grad E||_(N-2)^2")
    total += term(half[8:11], 2, N - 3, "||grad^2 B||_(N-3)^2")
    return total


def equivalence_report(weights: EnergyWeights, probe_states) -> tuple:
    """Empirical (c_low, c_high) of E_N / ||U||_N^2 over a probe set.

    A non-positive lower constant means the cross-term weights are too
    large and raises :class:`WeightsTooLargeError`.
    """
    probes = list(probe_states)
    if not probes:
        raise ValueError("probe set must be nonempty")
    ratios = []
    for U in probes:
        denom = squared_sobolev(U, weights.order)
        if denom == 0.0:
            raise ValueError("probe states must be nonzero")
        ratios.append(energy_full(U, weights) / denom)
    c_low, c_high = float(min(ratios)), float(max(ratios))
    if c_low <= 0:
        raise WeightsTooLargeError(
            f"energy functional lost positivity on the probe set (c_low={c_low:.3e}); "
            "reduce kappa1/kappa2"
        )
    return c_low, c_high


def validated_weights(grid: SpectralGrid, order: int = 4, kappa1: float = 0.05,
                      kappa2: float = 0.5, nprobes: int = 8, seed: int = 0) -> EnergyWeights:
    """Construct weights and certify equivalence on a random smooth probe set."""
    from .spectral import random_smooth_scalar, random_smooth_vector

    weights = EnergyWeights(order=order, kappa1=kappa1, kappa2=kappa2)
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(nprobes):
        probes.append(StateVector.from_fields(
            grid,
            n=random_smooth_scalar(grid, rng),
            u=random_smooth_vector(grid, rng),
            sigma=random_smooth_scalar(grid, rng),
            E=random_smooth_vector(grid, rng),
            B=random_smooth_vector(grid, rng),
        ))
    equivalence_report(weights, probes)
    return weights


# ---------------------------------------------------------------------------
# dissipation-inequality monitoring along a trajectory

@dataclass
class MonitorRow:
    t: float
    energy: float
    dissipation: float
    dEdt: float
    max_admissible_c: float
    violated: bool


@dataclass
class MonitorReport:
    rows: list
    c_trial: float

    @property
    def violation_fraction(self) -> float:
        if not self.rows:
            return 0.0
        return sum(r.violated for r in self.rows) / len(self.rows)

    @property
    def largest_admissible_c(self) -> float:
        vals = [r.max_admissible_c for r in self.rows]
        return float(min(vals)) if vals else float("inf")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "E_N", "D_N", "dEdt", "max_admissible_c", "violated"])
            for r in self.rows:
                w.writerow([repr(r.t), repr(r.energy), repr(r.dissipation),
                            repr(r.dEdt), repr(r.max_admissible_c), r.violated])


def monitor_dissipation(times, energies, dissipations, c_trial: float,
                        rel_tol: float = 1e-8) -> MonitorReport:
    """Check d/dt E_N + c D_N <= 0 along recorded (t, E_N, D_N) samples.

    The discrete derivative is centered on interior stamps and one-sided at
    the ends; an interval is flagged when the defect exceeds
    rel_tol * E_N / dt locally.
    """
    t = np.asarray(times, dtype=float)
    E = np.asarray(energies, dtype=float)
    D = np.asarray(dissipations, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise ValueError("need at least two samples to difference")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time stamps must be strictly increasing")
    dEdt = np.empty_like(E)
    dEdt[1:-1] = (E[2:] - E[:-2]) / (t[2:] - t[:-2])
    dEdt[0] = (E[1] - E[0]) / (t[1] - t[0])
    dEdt[-1] = (E[-1] - E[-2]) / (t[-1] - t[-2])
    dt_local = np.empty_like(E)
    dt_local[1:-1] = 0.5 * (t[2:] - t[:-2])
    dt_local[0] = t[1] - t[0]
    dt_local[-1] = t[-1] - t[-2]
    rows = []
    for k in range(len(t)):
        tol = rel_tol * E[k] / dt_local[k]
        defect = dEdt[k] + c_trial * D[k]
        if D[k] > 0:
            admissible = max(-dEdt[k], 0.0) / D[k]
        else:
            admissible = float("inf")
        rows.append(MonitorRow(float(t[k]), float(E[k]), float(D[k]), float(dEdt[k]),
                               float(admissible), bool(defect > tol)))
    return MonitorReport(rows=rows, c_trial=float(c_trial))
