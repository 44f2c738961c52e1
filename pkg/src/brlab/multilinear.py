"""k-linear operators via tensor spectra and diagonal restriction.

A k-linear multiplier acting on fields f_1, ..., f_k on a common
dimension-n grid is evaluated by forming the rank-one product spectrum
on the nk-dimensional product grid, multiplying by the symbol sampled
at the product lattice, inverse transforming, and restricting to the
diagonal (x, ..., x).  This is exact for band-limited inputs.

Desk-scale guards: n*k <= 6 and at most 2^26 product-lattice points by
default (override with ``max_points``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetError, DomainError, NyquistError
from .grid import Field, GridSpec, Spectrum, forward_dft, inverse_dft, restrict_diagonal
from .linear import ScaleSet, band_interval
from .multipliers import RadialProfile, bump_psi, m_alpha_j_symbol
from . import linear as _linear

__all__ = [
    "MultilinearRequest",
    "DEFAULT_MAX_POINTS",
    "apply_kbr",
    "maximal_kbr",
    "gtilde_k",
    "mj_piece",
    "b_beta_j_t_r",
    "b_beta_delta_star",
    "factorization_ratio",
]

DEFAULT_MAX_POINTS = 2**26

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class MultilinearRequest:
    """Inputs of a k-linear operator evaluation.

    ``split`` optionally carries (delta, beta) with delta + beta =
    alpha, delta > -1/2, beta > 0, used by the factorization check.
    """

    fields: Tuple[Field, ...]
    alpha: float
    Rset: Optional[ScaleSet] = None
    tset: Optional[ScaleSet] = None
    split: Optional[Tuple[float, float]] = None
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        fields = tuple(self.fields)
        object.__setattr__(self, "fields", fields)
        if len(fields) < 1 or len(fields) > 3:
            raise DomainError(f"k must be in 1..3, got {len(fields)}")
        g = fields[0].grid
        for f in fields[1:]:
            if f.grid != g:
                raise DomainError("all fields must share one grid")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if self.split is not None:
            delta, beta = self.split
            if not (beta > 0):
                raise DomainError(f"beta must be > 0, got {beta}")
            if not (delta > -0.5):
                raise DomainError(f"delta must be > -1/2, got {delta}")
            if abs(delta + beta - self.alpha) > 1e-12:
                raise DomainError("split must satisfy delta + beta = alpha")

    @property
    def k(self) -> int:
        return len(self.fields)

    @property
    def grid(self) -> GridSpec:
        return self.fields[0].grid


class _TensorApplier:
    """Cached product spectrum and product-lattice radii for one request."""

    def __init__(self, req: MultilinearRequest):
        g = req.grid
        k = req.k
        if g.n * k > 6:
            raise BudgetError(f"product dimension n*k = {g.n * k} exceeds 6")
        points = g.N ** (g.n * k)
        if points > req.max_points:
            raise BudgetError(
                f"product lattice needs {points} points, budget is {req.max_points}",
                required=points,
            )
        self.k = k
        self.small = g
        self.big = GridSpec(g.n * k, g.L, g.N)
        coeff_list = [forward_dft(f).coeffs for f in req.fields]
        prod = coeff_list[0]
        for c in coeff_list[1:]:
            prod = np.multiply.outer(prod, c)
        self.product_coeffs = prod.reshape(self.big.shape)
        self.q_total = self.big.freq_square_lattice()
        self._mode_radii = None

    def block_q(self, block: int) -> np.ndarray:
        return self.big.block_freq_square(block, self.k)

    def apply_symbol(self, symbol: np.ndarray) -> Field:
        big_field = inverse_dft(Spectrum(self.big, self.product_coeffs * symbol))
        return restrict_diagonal(big_field, self.k)

    def mode_radii(self) -> np.ndarray:
        """Distinct total radii sqrt(|xi_1|^2+...+|xi_k|^2) of active products."""
        if self._mode_radii is None:
            active = np.abs(self.product_coeffs) > 0
            self._mode_radii = np.unique(np.sqrt(self.q_total[active]))
        return self._mode_radii


def _br_symbol(q: np.ndarray, alpha: float, R: float) -> np.ndarray:
    base = 1.0 - q / (R * R)
    if alpha == 0:
        return np.where(base > 0.0, 1.0, 0.0)
    return np.where(base > 0.0, np.power(np.maximum(base, 0.0), alpha), 0.0)


def _check_nyquist(grid: GridSpec, radius: float, what: str) -> None:
    if radius >= grid.nyquist_radius * (1.0 + 1e-12):
        raise NyquistError(
            f"{what}: dilation {radius:.6g} reaches beyond the representable "
            f"frequency ball (Nyquist radius {grid.nyquist_radius:.6g})"
        )


def apply_kbr(req: MultilinearRequest, R: float, _applier: Optional[_TensorApplier] = None) -> Field:
    """k-linear Riesz mean at dilation R, evaluated on the diagonal."""
    if not (R > 0):
        raise DomainError(f"R must be positive, got {R}")
    _check_nyquist(req.grid, R, "apply_kbr")
    ta = _applier if _applier is not None else _TensorApplier(req)
    return ta.apply_symbol(_br_symbol(ta.q_total, req.alpha, R))


def maximal_kbr(req: MultilinearRequest) -> Field:
    """Pointwise max of |apply_kbr| over req.Rset."""
    if req.Rset is None or req.Rset.kind != "sup_grid":
        raise DomainError("maximal_kbr needs req.Rset of kind sup_grid")
    _check_nyquist(req.grid, float(req.Rset.values[-1]), "maximal_kbr")
    ta = _TensorApplier(req)
    out = np.zeros(req.grid.shape)
    for R in req.Rset.values:
        field = ta.apply_symbol(_br_symbol(ta.q_total, req.alpha, float(R)))
        np.maximum(out, np.abs(field.samples), out=out)
    return Field(req.grid, out)


def gtilde_k(req: MultilinearRequest, density: float = 8.0, max_breaks: int = 40) -> Field:
    """k-linear running-mean square function sup_R ((1/R) int_0^R |B_t|^2 dt)^(1/2).

    Quadrature panels break at the active total radii (thinned to at
    most ``max_breaks`` to bound the panel count); k = 1 reduces to the
    linear operator exactly.
    """
    if req.Rset is None or req.Rset.kind != "sup_grid":
        raise DomainError("gtilde_k needs req.Rset of kind sup_grid")
    _check_nyquist(req.grid, float(req.Rset.values[-1]), "gtilde_k")
    ta = _TensorApplier(req)
    radii = ta.mode_radii()
    radii = radii[radii > 0]
    if radii.size > max_breaks:
        idx = np.unique(np.linspace(0, radii.size - 1, max_breaks).astype(int))
        radii = radii[idx]
    best = np.zeros(req.grid.shape)
    for R in req.Rset.values:
        if req.tset is not None:
            if req.tset.kind != "mean_on_0R":
                raise DomainError("gtilde_k tset must have kind mean_on_0R")
            ref = float(req.tset.values[-1])
            nodes = req.tset.values * (R / ref)
            wts = req.tset.weights
        else:
            ts = ScaleSet.mean_on_0r(float(R), breakpoints=radii, density=density)
            nodes, wts = ts.values, ts.weights
        acc = np.zeros(req.grid.shape)
        for t, w in zip(nodes, wts):
            field = ta.apply_symbol(_br_symbol(ta.q_total, req.alpha, float(t)))
            acc += w * np.abs(field.samples) ** 2
        np.maximum(best, acc, out=best)
    return Field(req.grid, np.sqrt(best))


def mj_piece(
    req: MultilinearRequest,
    j: int,
    block: Optional[int] = None,
    bump: Optional[RadialProfile] = None,
    Rset: Optional[ScaleSet] = None,
) -> Field:
    """Maximal modulus over the R grid of the block-localized piece.

    The symbol is (1-|xi/R|^2)_+^alpha psi(2^j (1-|xi_block/R|^2));
    ``block`` defaults to the last input, the R grid to req.Rset.
    """
    rset = Rset if Rset is not None else req.Rset
    if rset is None or rset.kind != "sup_grid":
        raise DomainError("mj_piece needs a sup_grid R set")
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}")
    b = req.k if block is None else block
    sym = m_alpha_j_symbol(req.alpha, j, req.k, b, bump=bump)
    _check_nyquist(req.grid, float(rset.values[-1]), "mj_piece")
    ta = _TensorApplier(req)
    qb = ta.block_q(b)
    out = np.zeros(req.grid.shape)
    for R in rset.values:
        r2 = float(R) * float(R)
        field = ta.apply_symbol(sym.eval(ta.q_total / r2, qb / r2))
        np.maximum(out, np.abs(field.samples), out=out)
    return Field(req.grid, out)


def apply_mj_at(
    req: MultilinearRequest,
    j: int,
    R: float,
    block: Optional[int] = None,
    bump: Optional[RadialProfile] = None,
    _applier: Optional[_TensorApplier] = None,
) -> Field:
    """Single-dilation block piece (no supremum); used for telescoping checks."""
    if not (R > 0):
        raise DomainError(f"R must be positive, got {R}")
    _check_nyquist(req.grid, R, "apply_mj_at")
    b = req.k if block is None else block
    sym = m_alpha_j_symbol(req.alpha, j, req.k, b, bump=bump)
    ta = _applier if _applier is not None else _TensorApplier(req)
    r2 = R * R
    return ta.apply_symbol(sym.eval(ta.q_total / r2, ta.block_q(b) / r2))


def _b_beta_symbol(
    q: np.ndarray, beta: float, j: int, t: float, R: float, psi: RadialProfile
) -> Tuple[np.ndarray, int]:
    """Symbol (1-t^2-|eta|^2/R^2)_+^(beta-1) psi(2^j (1-|eta|^2/R^2)).

    Returns the symbol and the count of near-singular lattice samples
    (base in (0, 1e-14)), which matters when beta < 1.
    """
    u = q / (R * R)
    band = psi.eval((2.0**j) * (1.0 - u))
    base = 1.0 - t * t - u
    pos = base > 0.0
    if beta == 1.0:
        powed = np.where(pos, 1.0, 0.0)
    else:
        powed = np.where(pos, np.power(np.maximum(base, 1e-300), beta - 1.0), 0.0)
    near_singular = int(np.count_nonzero(pos & (base < 1e-14) & (band != 0.0)))
    sym = powed * band
    if not np.all(np.isfinite(sym)):
        bad = np.argwhere(~np.isfinite(sym))[0]
        raise DomainError(
            f"b_beta symbol non-finite at lattice index {tuple(int(v) for v in bad)}"
        )
    return sym, near_singular


def b_beta_j_t_r(
    f: Field,
    beta: float,
    j: int,
    t: float,
    R: float,
    bump: Optional[RadialProfile] = None,
) -> Field:
    """Reproducing-formula integrand operator at fixed (t, R).

    Requires t in [0, 2^(-(j-1)/2)); lattice points where the base
    1 - t^2 - |eta|^2/R^2 is nonpositive contribute 0.
    """
    if not (beta > 0):
        raise DomainError(f"beta must be > 0, got {beta}")
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    t_max = 2.0 ** (-(j - 1) / 2.0)
    if not (0.0 <= t < t_max):
        raise DomainError(f"t must be in [0, {t_max:.6g}) for j={j}, got {t}")
    if not (R > 0):
        raise DomainError(f"R must be positive, got {R}")
    _check_nyquist(f.grid, R, "b_beta_j_t_r")
    psi = bump if bump is not None else bump_psi()
    spec = forward_dft(f)
    sym, _ = _b_beta_symbol(f.grid.freq_square_lattice(), beta, j, t, R, psi)
    return inverse_dft(Spectrum(f.grid, spec.coeffs * sym))


def _b_star_t_edges(j: int, beta: float, kinks: Sequence[float], base_panels: int = 4) -> np.ndarray:
    """Panel edges on [0, 2^(-(j-1)/2)) with breaks at symbol kinks."""
    t_max = 2.0 ** (-(j - 1) / 2.0) * (1.0 - 1e-9)
    pts = [0.0, t_max]
    for c in kinks:
        if 1e-12 < c < t_max:
            pts.append(float(c))
    pts = np.unique(np.asarray(pts))
    # merge breakpoints closer than 1e-6 * t_max to bound the panel count
    keep = [pts[0]]
    for p in pts[1:]:
        if p - keep[-1] > 1e-6 * t_max:
            keep.append(p)
    edges = []
    for a, b in zip(keep[:-1], keep[1:]):
        splits = max(1, min(base_panels, int(math.ceil((b - a) / t_max * base_panels * 2))))
        edges.append(np.linspace(a, b, splits + 1)[:-1])
    edges.append(np.asarray([keep[-1]]))
    return np.concatenate(edges)


def b_beta_delta_star(
    f: Field,
    beta: float,
    delta: float,
    j: int,
    Rset: ScaleSet,
    tset: Optional[ScaleSet] = None,
    bump: Optional[RadialProfile] = None,
) -> Field:
    """Hybrid maximal operator sup_R (int_0^{2^(-(j-1)/2)} |B_{j,t,R} f * t^(2 delta+1)|^2 dt)^(1/2).

    The t weight is folded into the quadrature; panels break where the
    symbol base 1 - t^2 - |eta|^2/R^2 crosses zero for an active mode
    (the only interior kinks of the integrand).
    """
    if Rset is None or Rset.kind != "sup_grid":
        raise DomainError("b_beta_delta_star needs a sup_grid Rset")
    if not (delta > -0.5):
        raise DomainError(f"delta must be > -1/2, got {delta}")
    if not (beta > 0):
        raise DomainError(f"beta must be > 0, got {beta}")
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    _check_nyquist(f.grid, float(Rset.values[-1]), "b_beta_delta_star")
    psi = bump if bump is not None else bump_psi()
    spec = forward_dft(f)
    q = f.grid.freq_square_lattice()
    radii = spec.mode_radii()
    radii = radii[radii > 0]
    best = np.zeros(f.grid.shape)
    for R in Rset.values:
        R = float(R)
        if tset is None:
            # kinks: t^2 = 1 - rho^2/R^2 for active radii inside the psi band
            base = 1.0 - (radii / R) ** 2
            kinks = np.sqrt(base[base > 0])
            edges = _b_star_t_edges(j, beta, kinks)
        else:
            if tset.kind != "dt":
                raise DomainError("b_beta_delta_star tset must have kind dt")
            edges = None
        acc = np.zeros(f.grid.shape)
        if edges is not None:
            for a, b in zip(edges[:-1], edges[1:]):
                mid, half = 0.5 * (a + b), 0.5 * (b - a)
                for node, w in zip(_GL_NODES, _GL_WEIGHTS):
                    t = float(mid + half * node)
                    sym, _ = _b_beta_symbol(q, beta, j, t, R, psi)
                    piece = inverse_dft(Spectrum(f.grid, spec.coeffs * sym))
                    acc += (half * w) * (t ** (4.0 * delta + 2.0)) * np.abs(piece.samples) ** 2
        else:
            for t, w in zip(tset.values, tset.weights):
                sym, _ = _b_beta_symbol(q, beta, j, float(t), R, psi)
                piece = inverse_dft(Spectrum(f.grid, spec.coeffs * sym))
                acc += w * (float(t) ** (4.0 * delta + 2.0)) * np.abs(piece.samples) ** 2
        np.maximum(best, acc, out=best)
    return Field(f.grid, np.sqrt(best))


def factorization_ratio(
    req: MultilinearRequest,
    j: int,
    gtilde_Rset: Optional[ScaleSet] = None,
    bump: Optional[RadialProfile] = None,
) -> float:
    """Largest lattice ratio of the block piece to its factorized bound.

    Computes sup_x M_j(f_1,...,f_k)(x) / [2^(-j/4) * Gtilde^(k-1,delta)
    (f_1,...,f_{k-1})(x) * Bstar^(beta,delta)_j(f_k)(x)] for the
    request's (delta, beta) split; 0/0 counts as 0 and positive/0 as
    infinity.
    """
    if req.split is None:
        raise DomainError("factorization_ratio needs req.split = (delta, beta)")
    if req.Rset is None:
        raise DomainError("factorization_ratio needs req.Rset")
    delta, beta = req.split
    # the last input's psi band pins where the R supremum lives; use one
    # shared adapted R grid for both sides so the per-R inequality survives
    shared_rset = _bstar_band_rset(req, j)
    numer = mj_piece(req, j, block=req.k, bump=bump, Rset=shared_rset).samples.real
    first = req.fields[:-1]
    if len(first) == 1:
        gt = _linear.gtilde(first[0], delta, gtilde_Rset if gtilde_Rset is not None else req.Rset)
    else:
        sub = MultilinearRequest(
            fields=first, alpha=delta,
            Rset=gtilde_Rset if gtilde_Rset is not None else req.Rset,
            max_points=req.max_points,
        )
        gt = gtilde_k(sub)
    bs = b_beta_delta_star(req.fields[-1], beta, delta, j, shared_rset, bump=bump)
    denom = 2.0 ** (-j / 4.0) * gt.samples.real * bs.samples.real
    num = np.abs(numer)
    ratio = np.zeros_like(num)
    nz = denom > 0
    ratio[nz] = num[nz] / denom[nz]
    if np.any(~nz & (num > 1e-13 * num.max())):
        return float("inf")
    return float(ratio.max())


def _bstar_band_rset(req: MultilinearRequest, j: int, per_band: int = 9) -> ScaleSet:
    """R grid resolving the psi band of the last input's mode radii."""
    spec = forward_dft(req.fields[-1])
    radii = spec.mode_radii()
    radii = radii[radii > 0]
    if radii.size == 0:
        return req.Rset
    vals = []
    for rho in radii:
        lo, hi = band_interval(j, float(rho))
        hi = min(hi, req.grid.nyquist_radius * (1 - 1e-9))
        if lo < hi:
            vals.append(np.linspace(lo, hi, per_band))
    if not vals:
        return req.Rset
    allv = np.unique(np.concatenate(vals + [np.asarray(req.Rset.values)]))
    allv = allv[allv < req.grid.nyquist_radius * (1 - 1e-12)]
    return ScaleSet(allv, np.zeros_like(allv), "sup_grid")
