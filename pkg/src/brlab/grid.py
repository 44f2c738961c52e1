"""Periodic grids, fields, and discrete Fourier transforms.

Functions live on the box [-L/2, L/2)^n sampled at N points per axis and
are identified with trigonometric polynomials: a Field stores lattice
samples, a Spectrum stores the coefficients of

    f(x) = sum_xi  fhat(xi) * exp(2*pi*i * x . xi / L),

indexed by integer frequency vectors xi in [-N/2, N/2)^n.  With this
normalization the constant field 1 has a single unit coefficient at
xi = 0, and multiplier application (sampling a symbol at the exact
lattice frequencies) is alias-free on trigonometric polynomials.

Coefficient arrays use the standard FFT frequency layout
(0, 1, ..., N/2-1, -N/2, ..., -1) per axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import DomainError

__all__ = [
    "GridSpec",
    "Field",
    "Spectrum",
    "forward_dft",
    "inverse_dft",
    "make_band_limited",
    "restrict_diagonal",
]


@dataclass(frozen=True)
class GridSpec:
    """Sampling geometry: dimension n, period L, and N samples per axis.

    N must be an even power of two.  The frequency unit is 1/L; the
    representable integer frequencies per axis are [-N/2, N/2).
    Dimensions above 6 are rejected (product grids for k-linear
    operators never need more at desk scale).
    """

    n: int
    L: float
    N: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1 or self.n > 6:
            raise DomainError(f"grid dimension must be in 1..6, got {self.n}")
        if not (self.L > 0):
            raise DomainError(f"period L must be positive, got {self.L}")
        if not isinstance(self.N, int) or self.N < 4 or self.N % 2 != 0:
            raise DomainError(f"N must be an even integer >= 4, got {self.N}")
        if self.N & (self.N - 1) != 0:
            raise DomainError(f"N must be a power of two, got {self.N}")

    @property
    def h(self) -> float:
        """Lattice spacing L/N."""
        return self.L / self.N

    @property
    def nyquist_radius(self) -> float:
        """Largest safe physical frequency radius, N/(2L)."""
        return self.N / (2.0 * self.L)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    def axis_points(self) -> np.ndarray:
        """Sample coordinates of one axis, in [-L/2, L/2)."""
        return np.arange(self.N) * self.h - self.L / 2.0

    def axis_freq_integers(self) -> np.ndarray:
        """Integer frequencies of one axis in FFT layout."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(np.int64)

    def point_mesh(self) -> Tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``shape``, one per axis."""
        x = self.axis_points()
        return tuple(np.meshgrid(*([x] * self.n), indexing="ij"))

    def freq_square_lattice(self) -> np.ndarray:
        """|xi|^2 in physical units (xi = m/L) over the full lattice."""
        return _freq_square_lattice(self)

    def block_freq_square(self, block: int, k: int) -> np.ndarray:
        """|xi_block|^2 for one of k dimension-(n/k) blocks of this grid."""
        return _block_freq_square(self, block, k)


@lru_cache(maxsize=None)
def _axis_freq_sq(grid: GridSpec) -> np.ndarray:
    f = grid.axis_freq_integers() / grid.L
    out = f * f
    out.setflags(write=False)
    return out

@lru_cache(maxsize=None)
def _freq_square_lattice(grid: GridSpec) -> np.ndarray:
    fsq = _axis_freq_sq(grid)
    q = np.zeros(grid.shape)
    for axis in range(grid.n):
        shape = [1] * grid.n
        shape[axis] = grid.N
        q = q + fsq.reshape(shape)
    q.setflags(write=False)
    return q


@lru_cache(maxsize=None)
def _block_freq_square(grid: GridSpec, block: int, k: int) -> np.ndarray:
    if grid.n % k != 0:
        raise DomainError(f"grid dimension {grid.n} not divisible by k={k}")
    nb = grid.n // k
    if not 1 <= block <= k:
        raise DomainError(f"block must be in 1..{k}, got {block}")
    fsq = _axis_freq_sq(grid)
    q = np.zeros(grid.shape)
    for axis in range((block - 1) * nb, block * nb):
        shape = [1] * grid.n
        shape[axis] = grid.N
        q = q + fsq.reshape(shape)
    q.setflags(write=False)
    return q


@lru_cache(maxsize=None)
def _center_phase(grid: GridSpec) -> np.ndarray:
    """(-1)^(m_1+...+m_n) over the lattice; relates FFT indexing to the
    centered sample points x = -L/2 + i*h."""
    s = np.where(grid.axis_freq_integers() % 2 == 0, 1.0, -1.0)
    phase = np.ones(grid.shape)
    for axis in range(grid.n):
        shape = [1] * grid.n
        shape[axis] = grid.N
        phase = phase * s.reshape(shape)
    phase.setflags(write=False)
    return phase


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Field:
    """Complex samples over the lattice of ``grid`` (immutable)."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.samples)
        if a.dtype.kind not in "fc":
            a = a.astype(np.complex128)
        if a.shape == (self.grid.size,):
            a = a.reshape(self.grid.shape)
        if a.shape != self.grid.shape:
            raise DomainError(
                f"sample array shape {a.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(a)):
            raise DomainError("field samples must be finite")
        object.__setattr__(self, "samples", _freeze(a))

    def absolute(self) -> "Field":
        return Field(self.grid, np.abs(self.samples))


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients over integer frequencies, FFT layout (immutable)."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=np.complex128)
        if a.shape == (self.grid.size,):
            a = a.reshape(self.grid.shape)
        if a.shape != self.grid.shape:
            raise DomainError(
                f"coefficient array shape {a.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(a)):
            raise DomainError("spectrum coefficients must be finite")
        object.__setattr__(self, "coeffs", _freeze(a))

    def mode_radii(self, rel_tol: float = 0.0) -> np.ndarray:
        """Sorted distinct |xi| of the active (nonzero) coefficients.

        ``rel_tol`` drops coefficients below rel_tol * max|coeff|.
        """
        mags = np.abs(self.coeffs)
        cutoff = rel_tol * mags.max() if mags.size else 0.0
        active = mags > cutoff
        q = self.grid.freq_square_lattice()
        radii = np.sqrt(q[active])
        return np.unique(radii)


def forward_dft(field: Field) -> Spectrum:
    """Coefficients of the trigonometric polynomial through the samples."""
    g = field.grid
    phase = _center_phase(g)
    coeffs = np.fft.fftn(np.asarray(field.samples, dtype=np.complex128)) * phase / g.size
    return Spectrum(g, coeffs)


def inverse_dft(spec: Spectrum) -> Field:
    """Exact inverse of forward_dft."""
    g = spec.grid
    phase = _center_phase(g)
    samples = np.fft.ifftn(spec.coeffs * phase) * g.size
    return Field(g, samples)


def make_band_limited(
    grid: GridSpec, modes: Iterable[Tuple[Sequence[int] | int, complex]]
) -> Field:
    """Field with exactly the given nonzero Fourier coefficients.

    ``modes`` is a list of (integer frequency vector, amplitude) pairs;
    scalars are accepted for n = 1.  Frequencies outside [-N/2, N/2)
    per axis are rejected.
    """
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    half = grid.N // 2
    for freq, amp in modes:
        vec = np.atleast_1d(np.asarray(freq, dtype=np.int64))
        if vec.shape != (grid.n,):
            raise DomainError(f"frequency vector {freq!r} has wrong length for n={grid.n}")
        if np.any(vec < -half) or np.any(vec >= half):
            raise DomainError(
                f"frequency {tuple(int(v) for v in vec)} outside Nyquist range "
                f"[-{half}, {half}) for N={grid.N}"
            )
        idx = tuple(int(v) % grid.N for v in vec)
        coeffs[idx] += amp
    return inverse_dft(Spectrum(grid, coeffs))


def restrict_diagonal(big_field: Field, k: int) -> Field:
    """Evaluate a field on a k-fold product grid at (x, x, ..., x).

    The product grid must have dimension n*k with the same N and L per
    block; the result lives on the dimension-n grid.
    """
    big = big_field.grid
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if big.n % k != 0:
        raise DomainError(f"product dimension {big.n} not divisible by k={k}")
    n = big.n // k
    if k == 1:
        return big_field
    small = GridSpec(n, big.L, big.N)
    block = small.size
    flat = big_field.samples.reshape((block,) * k)
    idx = np.arange(block)
    diag = flat[(idx,) * k]
    return Field(small, diag.reshape(small.shape))
