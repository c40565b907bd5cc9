"""Periodic-box spectral fields: transforms, derivatives, projections, norms.

Conventions (the single source of truth for every norm comparison in the
package):

* A scalar field is a complex array of shape ``(n, n, n)`` holding Fourier
  coefficients in numpy FFT ordering; a vector field stacks three of them
  along a leading axis.  The physical field is ``sum_k c_k exp(i xi_k . x)``
  with ``xi_k = (2 pi / L) k``, so the forward transform carries the
  ``1 / n**3`` factor.
* Real physical fields correspond to Hermitian coefficient arrays
  (``c[-k] == conj(c[k])``).  Transform helpers that produce coefficients
  from real data are Hermitian by construction; ``enforce_hermitian``
  projects arbitrary coefficients onto that subspace.
* Perturbation fields are zero-mean: the ``k = 0`` coefficient vanishes.
  Operations that invert the Laplacian require this and raise
  :class:`ZeroMeanError` otherwise.
* L2 and Sobolev norms carry the box volume, so they approximate the
  continuum integrals: ``||f||^2 = V * sum_k |c_k|^2``.  The H^k weight is
  the multi-index sum ``sum_{|a| <= k} |xi^a|^2``.
"""

from __future__ import annotations

import struct

import numpy as np
import scipy.fft as _fft


class ZeroMeanError(ValueError):
    """A zero-mean perturbation field carried a nonzero mean coefficient."""


class SpectralGrid:
    """Cubic periodic grid: box side ``box_length``, ``resolution`` modes per axis."""

    def __init__(self, box_length: float = 2.0 * np.pi, resolution: int = 32):
        if resolution < 8 or resolution % 2 != 0:
            raise ValueError(f"resolution must be even and >= 8, got {resolution}")
        if not box_length > 0:
            raise ValueError(f"box_length must be positive, got {box_length}")
        self.box_length = float(box_length)
        self.resolution = int(resolution)
        n = self.resolution
        self.volume = self.box_length**3
        self.npoints = n**3
        self.k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)  # integer lattice, FFT order
        scale = 2.0 * np.pi / self.box_length
        kf = self.k.astype(float)
        # broadcastable frequency axes: xi[a] has the singleton shape for axis a
        self.xi = (
            scale * kf.reshape(n, 1, 1),
            scale * kf.reshape(1, n, 1),
            scale * kf.reshape(1, 1, n),
        )
        self.xi_sq = self.xi[0] ** 2 + self.xi[1] ** 2 + self.xi[2] ** 2
        self._dealias_masks = {}
        self._sobolev_weights = {}
        self._grad_weights = {}
        self._mesh = None
        self._half_embed = None

    def __eq__(self, other):
        return (
            isinstance(other, SpectralGrid)
            and other.resolution == self.resolution
            and other.box_length == self.box_length
        )

    def __repr__(self):
        return f"SpectralGrid(box_length={self.box_length!r}, resolution={self.resolution})"

    def mesh(self):
        """Physical coordinates, three arrays of shape (n, n, n)."""
        if self._mesh is None:
            n = self.resolution
            x1 = np.arange(n) * (self.box_length / n)
            self._mesh = np.meshgrid(x1, x1, x1, indexing="ij")
        return self._mesh

    def dealias_mask(self, fraction: float = 2.0 / 3.0) -> np.ndarray:
        """Boolean keep-mask of the sharp-cutoff dealiasing rule."""
        key = round(fraction, 12)
        if key not in self._dealias_masks:
            kmax = int(np.floor(fraction * (self.resolution // 2)))
            keep1 = np.abs(self.k) <= kmax
            self._dealias_masks[key] = (
                keep1.reshape(-1, 1, 1) & keep1.reshape(1, -1, 1) & keep1.reshape(1, 1, -1)
            )
        return self._dealias_masks[key]

    def grad_weight(self, order: int) -> np.ndarray:
        """sum over multi-indices |a| = order of |xi^a|^2, as an (n,n,n) array."""
        if order not in self._grad_weights:
            q1, q2, q3 = self.xi[0] ** 2, self.xi[1] ** 2, self.xi[2] ** 2
            total = np.zeros_like(self.xi_sq)
            for a1 in range(order + 1):
                for a2 in range(order - a1 + 1):
                    a3 = order - a1 - a2
                    total = total + q1**a1 * q2**a2 * q3**a3
            self._grad_weights[order] = total
        return self._grad_weights[order]

    def sobolev_weight(self, order: int) -> np.ndarray:
        """sum over multi-indices |a| <= order of |xi^a|^2."""
        if order not in self._sobolev_weights:
            total = np.zeros_like(self.xi_sq)
            for j in range(order + 1):
                total = total + self.grad_weight(j)
            self._sobolev_weights[order] = total
        return self._sobolev_weights[order]

    def _half_embed_indices(self):
        # gather indices rebuilding the full cube from the rfft half-spectrum
        if self._half_embed is None:
            n = self.resolution
            hk = n // 2 + 1
            neg = (-np.arange(n)) % n
            ix = neg.reshape(n, 1, 1)
            iy = neg.reshape(1, n, 1)
            iz = (n - np.arange(hk, n)).reshape(1, 1, n - hk)
            self._half_embed = (ix, iy, iz)
        return self._half_embed

    # -- half-spectrum (rfft layout) views; the internal fast path ---------
    # Real physical fields make the full cube redundant: the solver hot loop
    # keeps only the kz >= 0 half.  Reductions recover full-cube sums through
    # the conjugate-plane multiplicity.

    @property
    def half_modes(self) -> int:
        return self.resolution // 2 + 1

    @property
    def xi_half(self):
        hk = self.half_modes
        return (self.xi[0], self.xi[1], self.xi[2][..., :hk])

    @property
    def xi_sq_half(self):
        return self.xi_sq[..., : self.half_modes]

    def plane_multiplicity(self) -> np.ndarray:
        """Conjugate-pair weight per kz plane: 2 except the self-paired planes."""
        hk = self.half_modes
        mult = np.full((1, 1, hk), 2.0)
        mult[..., 0] = 1.0
        mult[..., hk - 1] = 1.0
        return mult

    def dealias_mask_half(self, fraction: float = 2.0 / 3.0) -> np.ndarray:
        return self.dealias_mask(fraction)[..., : self.half_modes]

    def sobolev_weight_half(self, order: int) -> np.ndarray:
        return self.sobolev_weight(order)[..., : self.half_modes]

    def grad_weight_half(self, order: int) -> np.ndarray:
        return self.grad_weight(order)[..., : self.half_modes]


# ---------------------------------------------------------------------------
# transforms

def to_spectral(grid: SpectralGrid, phys: np.ndarray) -> np.ndarray:
    """Physical samples -> Fourier coefficients (leading axes preserved)."""
    return _fft.fftn(phys, axes=(-3, -2, -1)) / grid.npoints


def to_physical(grid: SpectralGrid, coeff: np.ndarray) -> np.ndarray:
    """Fourier coefficients -> complex physical samples."""
    return _fft.ifftn(coeff, axes=(-3, -2, -1)) * grid.npoints


def to_physical_real(grid: SpectralGrid, coeff: np.ndarray) -> np.ndarray:
    """Fast inverse transform for Hermitian coefficients, returns real samples.

    Only the non-negative third-axis frequencies are transformed (the rest
    are implied by Hermitian symmetry, which the caller must guarantee).
    """
    n = grid.resolution
    half = np.ascontiguousarray(coeff[..., : n // 2 + 1])
    return _fft.irfftn(half, s=(n, n, n), axes=(-3, -2, -1)) * grid.npoints


def l2_norm_half(grid: SpectralGrid, half: np.ndarray) -> float:
    """L2 norm from rfft-layout coefficients (conjugate planes counted)."""
    mult = grid.plane_multiplicity()
    return float(np.sqrt(grid.volume * np.sum(mult * np.abs(half) ** 2)))


def spectral_from_real(grid: SpectralGrid, phys: np.ndarray) -> np.ndarray:
    """Real physical samples -> full Hermitian coefficient cube."""
    return full_from_half(grid, half_from_real(grid, phys))


# ---------------------------------------------------------------------------
# half-spectrum transforms and conversions (internal fast path)

def half_from_real(grid: SpectralGrid, phys: np.ndarray) -> np.ndarray:
    """Real physical samples -> rfft-layout coefficients, shape (..., n, n, n/2+1)."""
    return _fft.rfftn(phys, axes=(-3, -2, -1)) / grid.npoints


def real_from_half(grid: SpectralGrid, half: np.ndarray) -> np.ndarray:
    """rfft-layout coefficients -> real physical samples."""
    n = grid.resolution
    return _fft.irfftn(half, s=(n, n, n), axes=(-3, -2, -1)) * grid.npoints


def half_from_full(grid: SpectralGrid, coeff: np.ndarray) -> np.ndarray:
    """Drop the conjugate-redundant kz < 0 planes of a Hermitian cube."""
    return np.ascontiguousarray(coeff[..., : grid.half_modes])


def full_from_half(grid: SpectralGrid, half: np.ndarray) -> np.ndarray:
    """Rebuild the full Hermitian cube from rfft-layout coefficients."""
    n = grid.resolution
    hk = grid.half_modes
    out = np.empty(half.shape[:-3] + (n, n, n), dtype=complex)
    out[..., :hk] = half
    ix, iy, iz = grid._half_embed_indices()
    out[..., hk:] = np.conj(half[..., ix, iy, iz])
    return out


def enforce_hermitian(coeff: np.ndarray) -> np.ndarray:
    """Project coefficients onto the Hermitian (real physical field) subspace."""
    rev = np.roll(coeff[..., ::-1, ::-1, ::-1], shift=(1, 1, 1), axis=(-3, -2, -1))
    return 0.5 * (coeff + np.conj(rev))


def hermitian_defect(coeff: np.ndarray) -> float:
    """Max deviation of coefficients from Hermitian symmetry."""
    rev = np.roll(coeff[..., ::-1, ::-1, ::-1], shift=(1, 1, 1), axis=(-3, -2, -1))
    return float(np.max(np.abs(coeff - np.conj(rev))))


def require_zero_mean(grid: SpectralGrid, coeff: np.ndarray, what: str = "field",
                      tol: float = 1e-12):
    mean = np.abs(coeff[..., 0, 0, 0])
    scale = max(float(np.max(np.abs(coeff))), 1e-300)
    if np.any(mean > tol * scale):
        raise ZeroMeanError(
            f"{what} must be zero-mean; |mean coefficient| = {float(np.max(mean)):.3e} "
            f"exceeds {tol:g} x max coefficient {scale:.3e}"
        )


# ---------------------------------------------------------------------------
# differential operators (exact symbol calculus)

def gradient(grid: SpectralGrid, scalar: np.ndarray) -> np.ndarray:
    x1, x2, x3 = grid.xi
    return np.stack([1j * x1 * scalar, 1j * x2 * scalar, 1j * x3 * scalar])


def divergence(grid: SpectralGrid, vec: np.ndarray) -> np.ndarray:
    x1, x2, x3 = grid.xi
    return 1j * (x1 * vec[0] + x2 * vec[1] + x3 * vec[2])


def curl(grid: SpectralGrid, vec: np.ndarray) -> np.ndarray:
    x1, x2, x3 = grid.xi
    return np.stack([
        1j * (x2 * vec[2] - x3 * vec[1]),
        1j * (x3 * vec[0] - x1 * vec[2]),
        1j * (x1 * vec[1] - x2 * vec[0]),
    ])


def laplacian(grid: SpectralGrid, field: np.ndarray) -> np.ndarray:
    return -grid.xi_sq * field


def inverse_laplacian(grid: SpectralGrid, field: np.ndarray) -> np.ndarray:
    """Solve Laplace(u) = f on the zero-mean subspace (division by -|xi|^2)."""
    require_zero_mean(grid, field, what="inverse_laplacian input")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = field / (-grid.xi_sq)
    out[..., 0, 0, 0] = 0.0
    return out


def helmholtz_decompose(grid: SpectralGrid, vec: np.ndarray):
    """Split a zero-mean vector field into (curl-free, divergence-free) parts."""
    require_zero_mean(grid, vec, what="helmholtz input")
    x1, x2, x3 = grid.xi
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = (x1 * vec[0] + x2 * vec[1] + x3 * vec[2]) / grid.xi_sq
    factor[..., 0, 0, 0] = 0.0
    par = np.stack([x1 * factor, x2 * factor, x3 * factor])
    return par, vec - par


def e_par_from_density(grid: SpectralGrid, nhat: np.ndarray) -> np.ndarray:
    """Longitudinal electric field with div E = -n, per mode i xi n / |xi|^2."""
    require_zero_mean(grid, nhat, what="density")
    x1, x2, x3 = grid.xi
    with np.errstate(divide="ignore", invalid="ignore"):
        base = nhat / grid.xi_sq
    base[..., 0, 0, 0] = 0.0
    return np.stack([1j * x1 * base, 1j * x2 * base, 1j * x3 * base])


# ---------------------------------------------------------------------------
# norms and inner products

def l2_norm(grid: SpectralGrid, coeff: np.ndarray) -> float:
    """Continuum-normalized L2 norm (vector components summed when present)."""
    return float(np.sqrt(grid.volume * np.sum(np.abs(coeff) ** 2)))


def l2_inner(grid: SpectralGrid, a: np.ndarray, b: np.ndarray) -> float:
    """Real L2 inner product of (real) fields given by coefficients."""
    return float(grid.volume * np.real(np.sum(a * np.conj(b))))


def sobolev_norm(grid: SpectralGrid, coeff: np.ndarray, order: int) -> float:
    """H^order norm via Plancherel with the multi-index derivative weight."""
    if order < 0:
        raise ValueError(f"Sobolev order must be >= 0, got {order}")
    w = grid.sobolev_weight(order)
    return float(np.sqrt(grid.volume * np.sum(w * np.abs(coeff) ** 2)))


def dealias(grid: SpectralGrid, coeff: np.ndarray, fraction: float = 2.0 / 3.0) -> np.ndarray:
    return np.where(grid.dealias_mask(fraction), coeff, 0.0)


# ---------------------------------------------------------------------------
# random smooth fields (test probes and initial data)

def random_smooth_scalar(grid: SpectralGrid, rng, amplitude: float = 1.0,
                         decay: float = 0.35) -> np.ndarray:
    """Zero-mean Hermitian coefficients with an exp(-decay |k|^2) spectrum.

    Scaled so the physical field has unit (then ``amplitude``) max modulus.
    """
    n = grid.resolution
    white = rng.standard_normal((n, n, n))
    coeff = to_spectral(grid, white)
    k2 = (
        grid.k.reshape(n, 1, 1) ** 2
        + grid.k.reshape(1, n, 1) ** 2
        + grid.k.reshape(1, 1, n) ** 2
    )
    coeff = coeff * np.exp(-decay * k2)
    coeff[0, 0, 0] = 0.0
    phys = to_physical_real(grid, coeff)
    peak = float(np.max(np.abs(phys)))
    if peak == 0.0:
        return coeff
    return coeff * (amplitude / peak)


def random_smooth_vector(grid: SpectralGrid, rng, amplitude: float = 1.0,
                         decay: float = 0.35) -> np.ndarray:
    return np.stack([
        random_smooth_scalar(grid, rng, amplitude, decay) for _ in range(3)
    ])


# ---------------------------------------------------------------------------
# snapshot format
#
# Layout: header = box_length (little-endian float64) + resolution
# (little-endian int32); then one block per component, each the coefficient
# cube reordered to ascending wavenumber (lexicographic in (k1, k2, k3),
# i.e. fftshift order) and flattened C-style, stored as little-endian
# complex128 (real, imaginary interleaved 8-byte floats).  The component
# count is implied by the file size.

_HEADER = struct.Struct("<di")


def write_snapshot(path, grid: SpectralGrid, coeff: np.ndarray):
    comps = np.asarray(coeff, dtype=complex)
    if comps.ndim == 3:
        comps = comps[None]
    if comps.shape[-3:] != (grid.resolution,) * 3:
        raise ValueError(f"coefficient shape {comps.shape} does not match grid {grid!r}")
    comps = comps.reshape((-1,) + comps.shape[-3:])
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(grid.box_length, grid.resolution))
        for c in comps:
            shifted = np.fft.fftshift(c)
            fh.write(np.ascontiguousarray(shifted, dtype="<c16").tobytes())


def read_snapshot(path):
    """Read a snapshot; returns (grid, coefficients of shape (ncomp, n, n, n))."""
    with open(path, "rb") as fh:
        raw = fh.read()
    box_length, n = _HEADER.unpack_from(raw)
    grid = SpectralGrid(box_length=box_length, resolution=n)
    body = raw[_HEADER.size:]
    per_comp = n**3 * 16
    if len(body) % per_comp != 0:
        raise ValueError(f"snapshot body of {len(body)} bytes is not a whole number of "
                         f"{n}^3 complex components")
    ncomp = len(body) // per_comp
    flat = np.frombuffer(body, dtype="<c16").astype(complex)
    comps = flat.reshape(ncomp, n, n, n)
    return grid, np.stack([np.fft.ifftshift(c) for c in comps])
