"""Matrix exponentials: scaling-and-squaring with the degree-13 Pade form.

One fixed high-order rational approximant is used at every call site
(single matrices and batches alike); accuracy is cross-checked module-wide
against the adaptive ODE integrator in :mod:`nsmaxwell.oracles`.
"""

from __future__ import annotations

import numpy as np

# degree-13 Pade numerator coefficients and its validity radius in 1-norm
_B = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
    33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0,
])
_THETA13 = 5.371920351148152


def _pade13_batch(A: np.ndarray) -> np.ndarray:
    d = A.shape[-1]
    eye = np.broadcast_to(np.eye(d, dtype=A.dtype), A.shape)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A2 @ A4
    U = A @ (
        A6 @ (_B[13] * A6 + _B[11] * A4 + _B[9] * A2)
        + _B[7] * A6 + _B[5] * A4 + _B[3] * A2 + _B[1] * eye
    )
    V = (
        A6 @ (_B[12] * A6 + _B[10] * A4 + _B[8] * A2)
        + _B[6] * A6 + _B[4] * A4 + _B[2] * A2 + _B[0] * eye
    )
    return np.linalg.solve(V - U, V + U)


def expm_batch(A: np.ndarray) -> np.ndarray:
    """exp(A) for a stack of square matrices, shape (..., d, d)."""
    A = np.asarray(A, dtype=complex)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    lead = A.shape[:-2]
    d = A.shape[-1]
    flat = A.reshape(-1, d, d)
    norm1 = np.abs(flat).sum(axis=-2).max(axis=-1)
    s = np.zeros(flat.shape[0], dtype=np.int64)
    big = norm1 > _THETA13
    s[big] = np.ceil(np.log2(norm1[big] / _THETA13)).astype(np.int64)
    out = np.empty_like(flat)
    for sval in np.unique(s):
        sel = s == sval
        F = _pade13_batch(flat[sel] / (2.0**sval))
        for _ in range(int(sval)):
            F = F @ F
        out[sel] = F
    return out.reshape(lead + (d, d))


def expm(A: np.ndarray) -> np.ndarray:
    """exp(A) for one square matrix."""
    return expm_batch(np.asarray(A)[None])[0]


def matrix_exponential_apply(A: np.ndarray, t: float, v: np.ndarray) -> np.ndarray:
    """exp(A t) @ v for t >= 0."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    A = np.asarray(A, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != A.shape[-1]:
        raise ValueError(f"vector of length {v.shape[0]} does not match {A.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return expm(A * t) @ v
