"""The eleven-component perturbation state on a spectral grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralGrid, l2_norm

COMPONENTS = ("n", "u1", "u2", "u3", "sigma", "E1", "E2", "E3", "B1", "B2", "B3")
NFIELDS = len(COMPONENTS)


@dataclass
class StateVector:
    """Perturbation fields [n, u, sigma, E, B] stored as one coefficient stack.

    ``data`` has shape ``(11, n, n, n)`` (complex, spectral).  Field
    accessors return views, so in-place edits write through.
    """

    grid: SpectralGrid
    data: np.ndarray

    def __post_init__(self):
        n = self.grid.resolution
        if self.data.shape != (NFIELDS, n, n, n):
            raise ValueError(
                f"state data must have shape {(NFIELDS, n, n, n)}, got {self.data.shape}"
            )

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "StateVector":
        n = grid.resolution
        return cls(grid, np.zeros((NFIELDS, n, n, n), dtype=complex))

    @classmethod
    def from_fields(cls, grid: SpectralGrid, n=None, u=None, sigma=None, E=None,
                    B=None) -> "StateVector":
        out = cls.zeros(grid)
        if n is not None:
            out.data[0] = n
        if u is not None:
            out.data[1:4] = u
        if sigma is not None:
            out.data[4] = sigma
        if E is not None:
            out.data[5:8] = E
        if B is not None:
            out.data[8:11] = B
        return out

    @property
    def n(self):
        return self.data[0]

    @property
    def u(self):
        return self.data[1:4]

    @property
    def sigma(self):
        return self.data[4]

    @property
    def E(self):
        return self.data[5:8]

    @property
    def B(self):
        return self.data[8:11]

    def copy(self) -> "StateVector":
        return StateVector(self.grid, self.data.copy())

    def component_l2(self) -> dict:
        g = self.grid
        return {
            "n": l2_norm(g, self.n),
            "u": l2_norm(g, self.u),
            "sigma": l2_norm(g, self.sigma),
            "E": l2_norm(g, self.E),
            "B": l2_norm(g, self.B),
        }
