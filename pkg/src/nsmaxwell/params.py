"""Physical parameters and pressure laws.

The model is a compressible, viscous, heat-conducting charged fluid.  All
coefficients are taken constant; the equilibrium state is density 1,
velocity 0, temperature 1, zero electromagnetic field.  Linearization
around that state produces four derived constants

    alpha1 = P_rho(1, 1),   alpha2 = P_theta(1, 1),
    alpha3 = P_theta(1, 1) / c_nu,   kappa_bar = kappa / c_nu,

which every downstream module reads off :class:`ModelParams`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class IdealGasLaw:
    """P(rho, theta) = rho * theta."""

    name: str = "ideal"

    def partials(self, rho, theta):
        """Return (P, P_rho, P_theta) at the given state."""
        rho = np.asarray(rho, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return rho * theta, theta, rho


@dataclass(frozen=True)
class VirialGasLaw:
    """P(rho, theta) = rho * theta * (1 + b * rho).

    A second smooth law with non-constant partial derivatives, used to
    exercise pressure-coefficient code paths that the ideal gas (whose
    partials are linear) cannot distinguish.
    """

    b: float = 0.3
    name: str = "virial"

    def partials(self, rho, theta):
        rho = np.asarray(rho, dtype=float)
        theta = np.asarray(theta, dtype=float)
        p = rho * theta * (1.0 + self.b * rho)
        p_rho = theta * (1.0 + 2.0 * self.b * rho)
        p_theta = rho * (1.0 + self.b * rho)
        return p, p_rho, p_theta


PRESSURE_LAWS = {
    "ideal": IdealGasLaw,
    "virial": VirialGasLaw,
}


@dataclass(frozen=True)
class ModelParams:
    """Constant coefficients of the model.

    mu        shear viscosity, > 0
    mu_prime  second viscosity, constrained by mu + (2/3) mu_prime > 0
    kappa     heat conductivity, > 0
    c_nu      specific heat, > 0
    pressure  smooth pressure law exposing ``partials(rho, theta)``
    """

    mu: float = 1.0
    mu_prime: float = 0.0
    kappa: float = 1.0
    c_nu: float = 1.5
    pressure: object = field(default_factory=IdealGasLaw)

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"shear viscosity must be positive, got mu={self.mu}")
        if not self.mu + (2.0 / 3.0) * self.mu_prime > 0:
            raise ValueError(
                f"need mu + (2/3) mu_prime > 0, got {self.mu + 2 / 3 * self.mu_prime}"
            )
        if not self.kappa > 0:
            raise ValueError(f"heat conductivity must be positive, got kappa={self.kappa}")
        if not self.c_nu > 0:
            raise ValueError(f"specific heat must be positive, got c_nu={self.c_nu}")
        _, p_rho, p_theta = self.pressure.partials(1.0, 1.0)
        if not (p_rho > 0 and p_theta > 0):
            raise ValueError(
                "pressure partials at the equilibrium state must be positive, "
                f"got P_rho={p_rho}, P_theta={p_theta}"
            )

    @property
    def alpha1(self) -> float:
        return float(self.pressure.partials(1.0, 1.0)[1])

    @property
    def alpha2(self) -> float:
        return float(self.pressure.partials(1.0, 1.0)[2])

    @property
    def alpha3(self) -> float:
        return self.alpha2 / self.c_nu

    @property
    def kappa_bar(self) -> float:
        return self.kappa / self.c_nu


def pressure_partials(rho, theta, params: ModelParams):
    """Evaluate (P, P_rho, P_theta) of the configured law.

    Raises ValueError on non-positive density or temperature anywhere.
    """
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("density must be positive")
    if np.any(theta <= 0):
        raise ValueError("temperature must be positive")
    return params.pressure.partials(rho, theta)


def params_hash(params: ModelParams) -> str:
    """Short deterministic digest of the parameter set, for output tagging."""
    law = params.pressure
    extra = getattr(law, "b", "")
    key = (
        f"{params.mu!r},{params.mu_prime!r},{params.kappa!r},{params.c_nu!r},"
        f"{law.name},{extra!r}"
    )
    return hashlib.md5(key.encode()).hexdigest()[:10]
