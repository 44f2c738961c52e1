"""Discrete Lebesgue norms, power weights, field splitting, and ensembles.

Norms are Riemann sums over the sampling lattice with cell volume h^n.
The power weight |x|^(-gamma) is regularized on the origin cell by its
cell average (closed form in one dimension, quadrature in two and
three), which keeps the gamma-dependence continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .grid import Field, GridSpec, make_band_limited

__all__ = [
    "WeightSpec",
    "lp_norm",
    "weighted_lp_norm",
    "SplitResult",
    "split_field",
    "opnorm_lower_bound",
    "norm_fn",
    "random_annulus_ensemble",
]


@dataclass(frozen=True)
class WeightSpec:
    """Power weight |x|^(-gamma) paired with a Lebesgue exponent p."""

    gamma: float
    p: float

    def __post_init__(self):
        if not (self.gamma >= 0):
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if not (self.p > 0):
            raise DomainError(f"p must be positive, got {self.p}")


def lp_norm(f: Field, p: float) -> float:
    """(sum |f(x)|^p h^n)^(1/p)."""
    if not (p > 0):
        raise DomainError(f"p must be positive, got {p}")
    h_n = f.grid.h ** f.grid.n
    return float(np.sum(np.abs(f.samples) ** p * h_n) ** (1.0 / p))


@lru_cache(maxsize=None)
def _origin_cell_average(gamma: float, n: int, h: float) -> float:
    """Average of |x|^(-gamma) over the origin cell [-h/2, h/2)^n."""
    if gamma == 0.0:
        return 1.0
    if n == 1:
        # (1/h) * 2 * (h/2)^(1-gamma) / (1-gamma)
        return 2.0 * (h / 2.0) ** (1.0 - gamma) / (h * (1.0 - gamma))
    nodes, wts = np.polynomial.legendre.leggauss(64)
    if n == 2:
        # polar form: integral over angle of r(theta)^(2-gamma)/(2-gamma)
        theta = 0.25 * np.pi * (nodes + 1.0)          # one octant, by symmetry
        w = 0.25 * np.pi * wts
        r_edge = (h / 2.0) / np.cos(theta)
        val = 8.0 * np.sum(w * r_edge ** (2.0 - gamma)) / (2.0 - gamma)
        return float(val / h**2)
    if n == 3:
        # spherical form over one face-octant: r(omega) = (h/2)/max|omega_i|
        u = 0.5 * (nodes + 1.0)
        total = 0.0
        for i, ui in enumerate(u):
            for jj, uj in enumerate(u):
                x, y = ui, uj           # face z = 1, direction (x, y, 1)
                norm = math.sqrt(x * x + y * y + 1.0)
                r_edge = (h / 2.0) * norm
                jac = 1.0 / norm**3     # solid-angle element of the face param
                total += wts[i] * wts[jj] * 0.25 * jac * r_edge ** (3.0 - gamma)
        # ``total`` covers a quarter face; 4 quarters per face, 6 faces
        val = 24.0 * total / (3.0 - gamma)
        return float(val / h**3)
    raise DomainError(f"origin-cell regularization implemented for n <= 3, got {n}")


@lru_cache(maxsize=None)
def _weight_lattice(grid: GridSpec, gamma: float) -> np.ndarray:
    mesh = grid.point_mesh()
    r2 = np.zeros(grid.shape)
    for c in mesh:
        r2 = r2 + c * c
    w = np.empty(grid.shape)
    nz = r2 > 0
    w[nz] = r2[nz] ** (-gamma / 2.0)
    w[~nz] = _origin_cell_average(gamma, grid.n, grid.h)
    w.setflags(write=False)
    return w


def weighted_lp_norm(f: Field, w: WeightSpec) -> float:
    """(sum |f(x)|^p |x|^(-gamma) h^n)^(1/p), origin cell averaged."""
    if w.gamma >= f.grid.n:
        raise DomainError(
            f"gamma must be < n for local integrability, got gamma={w.gamma}, n={f.grid.n}"
        )
    if w.gamma == 0.0:
        return lp_norm(f, w.p)
    wt = _weight_lattice(f.grid, w.gamma)
    h_n = f.grid.h ** f.grid.n
    return float(np.sum(np.abs(f.samples) ** w.p * wt * h_n) ** (1.0 / w.p))


@dataclass(frozen=True)
class SplitResult:
    """Inner/outer split of a field with the two controlling norms."""

    inner: Field
    outer: Field
    l2_inner: float
    weighted_l2_outer: float


def split_field(f: Field, q: float, omega: float, radius: float = 1.0) -> SplitResult:
    """Split f into an L2 piece (|x| <= radius) and a weighted-L2 piece.

    Requires omega > n(1 - 2/q): then the outer piece lies in
    L2(|x|^-omega) with norm controlled by the L^q norm of f.
    """
    if not (q >= 2):
        raise DomainError(f"q must be >= 2, got {q}")
    n = f.grid.n
    if not (omega > n * (1.0 - 2.0 / q)):
        raise DomainError(
            f"omega must exceed n(1-2/q) = {n * (1.0 - 2.0 / q):.6g}, got {omega}"
        )
    if omega >= n:
        raise DomainError(f"omega must be < n for local integrability, got {omega}")
    mesh = f.grid.point_mesh()
    r2 = np.zeros(f.grid.shape)
    for c in mesh:
        r2 = r2 + c * c
    inside = r2 <= radius * radius
    inner = Field(f.grid, np.where(inside, f.samples, 0.0))
    outer = Field(f.grid, np.where(inside, 0.0, f.samples))
    return SplitResult(
        inner=inner,
        outer=outer,
        l2_inner=lp_norm(inner, 2.0),
        weighted_l2_outer=weighted_lp_norm(outer, WeightSpec(gamma=omega, p=2.0)),
    )


def norm_fn(p: float, gamma: Optional[float] = None) -> Callable[[Field], float]:
    """Norm functional: plain L^p, or L^p(|x|^-gamma) when gamma is given."""
    if gamma is None or gamma == 0.0:
        return lambda f: lp_norm(f, p)
    spec = WeightSpec(gamma=gamma, p=p)
    return lambda f: weighted_lp_norm(f, spec)


def opnorm_lower_bound(
    operator: Callable[..., Field],
    ensemble: Sequence[Sequence[Field]],
    in_norms: Sequence[Callable[[Field], float]],
    out_norm: Callable[[Field], float],
) -> float:
    """Max over the ensemble of out-norm / product of in-norms.

    A certified lower bound for the operator norm.  Members with a zero
    input norm are skipped (their count is reported via warning).
    """
    if len(ensemble) == 0:
        raise DomainError("ensemble must be nonempty")
    best = 0.0
    skipped = 0
    for member in ensemble:
        fields = tuple(member) if isinstance(member, (tuple, list)) else (member,)
        if len(fields) != len(in_norms):
            raise DomainError("ensemble member arity does not match in_norms")
        denom = 1.0
        ok = True
        for g, nf in zip(fields, in_norms):
            v = nf(g)
            if v == 0.0:
                ok = False
                break
            denom *= v
        if not ok:
            skipped += 1
            continue
        best = max(best, out_norm(operator(*fields)) / denom)
    if skipped:
        import warnings

        warnings.warn(f"opnorm_lower_bound skipped {skipped} zero-input members")
    return best


def random_annulus_ensemble(
    grid: GridSpec,
    count: int,
    modes_per_field: int,
    rho_min: float,
    rho_max: float,
    seed: int,
    k: int = 1,
) -> list:
    """Seeded complex-Gaussian fields supported on a frequency annulus.

    Draws modes uniformly (without replacement where possible) from the
    lattice frequencies with rho_min <= |xi| <= rho_max and gives them
    iid standard complex-Gaussian amplitudes.  The generator is
    numpy's PCG64 seeded with ``seed``; identical seeds reproduce the
    ensemble bit-for-bit.  Returns ``count`` tuples of ``k`` fields.
    """
    if count < 1 or modes_per_field < 1 or k < 1:
        raise DomainError("count, modes_per_field, and k must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    ints = grid.axis_freq_integers()
    mesh = np.meshgrid(*([ints] * grid.n), indexing="ij")
    vecs = np.stack([m.ravel() for m in mesh], axis=1)
    rho = np.sqrt(np.sum((vecs / grid.L) ** 2, axis=1))
    pool = vecs[(rho >= rho_min) & (rho <= rho_max)]
    if pool.shape[0] == 0:
        raise DomainError(
            f"no lattice frequencies with |xi| in [{rho_min}, {rho_max}] on this grid"
        )
    out = []
    for _ in range(count):
        member = []
        for _ in range(k):
            m = min(modes_per_field, pool.shape[0])
            pick = rng.choice(pool.shape[0], size=m, replace=pool.shape[0] < modes_per_field)
            amps = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / math.sqrt(2.0)
            modes = [(tuple(int(v) for v in pool[i]), a) for i, a in zip(pick, amps)]
            member.append(make_band_limited(grid, modes))
        out.append(tuple(member))
    return out
