"""Linear operators: Riesz means, maximal operators, and square functions.

Every operator here is a Fourier multiplier (or a supremum/quadrature
of multipliers) applied to a band-limited Field: the symbol is sampled
at the exact lattice frequencies, so single modes are mapped to exact
scalar multiples of themselves and all identities hold to rounding.

Suprema over the continuous dilation parameter R are discretized on
explicit grids (ScaleSet); reported values are certified lower bounds
for the true suprema.  Time integrals use Gauss-Legendre panels with
breakpoints at the active mode radii, where the integrands lose
smoothness, so node-doubling changes results only at quadrature-floor
level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, NyquistError
from .grid import Field, GridSpec, Spectrum, forward_dft, inverse_dft
from .multipliers import RadialProfile, br_profile, bump_psi, sigma_profile
from .special import radial_fourier

__all__ = [
    "ScaleSet",
    "ExponentPredictor",
    "apply_br",
    "maximal_br",
    "gtilde",
    "stein_g",
    "band_piece",
    "band_maximal",
    "g_psi_j",
    "gtilde_psi_j",
    "l2_opnorm_g_psi_j",
    "kernel_kj",
    "band_interval",
    "band_sup_grid",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class ScaleSet:
    """A grid of radii/times with quadrature weights and a kind tag.

    kinds: ``sup_grid`` (pointwise maximum, weights unused),
    ``dt`` / ``dt_over_t`` (sum weights*f(values) approximates the
    tagged integral), ``mean_on_0R`` (weights normalized so the sum
    approximates (1/R) * int_0^R).
    """

    values: np.ndarray
    weights: np.ndarray
    kind: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if v.size == 0:
            raise DomainError("empty scale set")
        if np.any(v <= 0) or np.any(np.diff(v) <= 0):
            raise DomainError("scale values must be positive and strictly increasing")
        if w.shape != v.shape or np.any(w < 0):
            raise DomainError("weights must be nonnegative and match values")
        if self.kind not in ("sup_grid", "dt", "dt_over_t", "mean_on_0R"):
            raise DomainError(f"unknown scale-set kind {self.kind!r}")
        object.__setattr__(self, "values", _readonly(v))
        object.__setattr__(self, "weights", _readonly(w))

    @staticmethod
    def geometric(vmin: float, vmax: float, ratio: float = 2.0 ** (1.0 / 16.0)) -> "ScaleSet":
        """sup-grid of geometrically spaced values covering [vmin, vmax]."""
        if not (0 < vmin < vmax) or not (ratio > 1):
            raise DomainError("need 0 < vmin < vmax and ratio > 1")
        count = int(np.floor(np.log(vmax / vmin) / np.log(ratio))) + 1
        vals = vmin * ratio ** np.arange(count)
        if vals[-1] < vmax * (1 - 1e-12):
            vals = np.append(vals, vmax)
        return ScaleSet(vals, np.zeros_like(vals), "sup_grid")

    @staticmethod
    def single(value: float) -> "ScaleSet":
        return ScaleSet(np.array([value]), np.zeros(1), "sup_grid")

    @staticmethod
    def from_values(values: Sequence[float]) -> "ScaleSet":
        vals = np.unique(np.asarray(values, dtype=np.float64))
        return ScaleSet(vals, np.zeros_like(vals), "sup_grid")

    @staticmethod
    def gl_panels(edges: Sequence[float], kind: str = "dt") -> "ScaleSet":
        """Gauss-Legendre nodes/weights on the panels defined by ``edges``.

        For kind ``dt_over_t`` the 1/t factor is folded into the weights.
        """
        edges = np.asarray(edges, dtype=np.float64)
        if edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise DomainError("panel edges must be strictly increasing")
        mids = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * np.diff(edges)
        vals = (mids[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        order = np.argsort(vals)
        vals, wts = vals[order], wts[order]
        if kind == "dt_over_t":
            wts = wts / vals
        return ScaleSet(vals, wts, kind)

    @staticmethod
    def mean_on_0r(R: float, breakpoints: Sequence[float] = (), density: float = 8.0) -> "ScaleSet":
        """Quadrature for (1/R) int_0^R dt with panel breaks at ``breakpoints``."""
        if not (R > 0):
            raise DomainError("R must be positive")
        edges = _panel_edges(0.0, R, breakpoints, density)
        s = ScaleSet.gl_panels(edges, "dt")
        return ScaleSet(s.values, s.weights / R, "mean_on_0R")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _panel_edges(lo: float, hi: float, breakpoints: Sequence[float], density: float) -> np.ndarray:
    """Panel edges on [lo, hi]: breakpoints plus density-driven splits."""
    pts = [lo, hi]
    for b in breakpoints:
        if lo < b < hi:
            pts.append(float(b))
    pts = np.unique(np.asarray(pts))
    edges = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        splits = max(1, int(np.ceil((b - a) * density / 12.0)))
        edges.extend(np.linspace(a, b, splits + 1)[1:])
    return np.asarray(edges)


# ---------------------------------------------------------------------------
# multiplier application

def _check_nyquist(grid: GridSpec, support_radius: float, what: str) -> None:
    if support_radius >= grid.nyquist_radius * (1.0 + 1e-12):
        raise NyquistError(
            f"{what}: symbol support radius {support_radius:.6g} reaches beyond the "
            f"representable frequency ball (Nyquist radius {grid.nyquist_radius:.6g}); "
            f"increase N or reduce the dilation"
        )


def _apply_symbol(spec: Spectrum, symbol: np.ndarray) -> Field:
    return inverse_dft(Spectrum(spec.grid, spec.coeffs * symbol))


def _br_symbol(q: np.ndarray, alpha: float, R: float) -> np.ndarray:
    base = 1.0 - q / (R * R)
    if alpha == 0:
        return np.where(base > 0.0, 1.0, 0.0)
    return np.where(base > 0.0, np.power(np.maximum(base, 0.0), alpha), 0.0)


def apply_br(f: Field, alpha: float, R: float) -> Field:
    """Riesz mean at dilation R: multiply the spectrum by (1-|xi|^2/R^2)_+^alpha."""
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    if not (R > 0):
        raise DomainError(f"R must be positive, got {R}")
    _check_nyquist(f.grid, R, "apply_br")
    spec = forward_dft(f)
    q = f.grid.freq_square_lattice()
    return _apply_symbol(spec, _br_symbol(q, alpha, R))


def maximal_br(f: Field, alpha: float, Rset: ScaleSet) -> Field:
    """Pointwise max of |apply_br| over the R grid (lower bound for the sup)."""
    if Rset.kind != "sup_grid":
        raise DomainError("maximal_br needs a sup_grid scale set")
    _check_nyquist(f.grid, float(Rset.values[-1]), "maximal_br")
    spec = forward_dft(f)
    q = f.grid.freq_square_lattice()
    out = np.zeros(f.grid.shape)
    for R in Rset.values:
        cur = np.abs(_apply_symbol(spec, _br_symbol(q, alpha, R)).samples)
        np.maximum(out, cur, out=out)
    return Field(f.grid, out)


def _active_radii(spec: Spectrum) -> np.ndarray:
    radii = spec.mode_radii()
    return radii[radii > 0]


def gtilde(
    f: Field,
    alpha: float,
    Rset: ScaleSet,
    tset: Optional[ScaleSet] = None,
    density: float = 8.0,
) -> Field:
    """Running-mean square function sup_R ((1/R) int_0^R |B_t f|^2 dt)^(1/2).

    If ``tset`` is omitted, each R gets Gauss-Legendre panels on [0, R]
    broken at the active mode radii (the only points where the
    integrand loses smoothness); a provided mean_on_0R tset is rescaled
    from its own range onto [0, R] for each R.
    """
    if Rset.kind != "sup_grid":
        raise DomainError("gtilde needs a sup_grid R set")
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    _check_nyquist(f.grid, float(Rset.values[-1]), "gtilde")
    spec = forward_dft(f)
    q = f.grid.freq_square_lattice()
    radii = _active_radii(spec)
    best = np.zeros(f.grid.shape)
    for R in Rset.values:
        if tset is None:
            ts = ScaleSet.mean_on_0r(float(R), breakpoints=radii, density=density)
            nodes, wts = ts.values, ts.weights
        else:
            if tset.kind != "mean_on_0R":
                raise DomainError("gtilde tset must have kind mean_on_0R")
            ref = float(tset.values[-1])
            nodes = tset.values * (R / ref)
            wts = tset.weights
        _check_nyquist(f.grid, float(nodes[-1]), "gtilde")
        acc = np.zeros(f.grid.shape)
        for t, w in zip(nodes, wts):
            bt = _apply_symbol(spec, _br_symbol(q, alpha, t))
            acc += w * np.abs(bt.samples) ** 2
        np.maximum(best, acc, out=best)
    return Field(f.grid, np.sqrt(best))


def stein_g(
    f: Field,
    alpha: float,
    tset: Optional[ScaleSet] = None,
    per_octave: float = 16.0,
    tail_factor: float = 200.0,
) -> Field:
    """Scale-square function (int_0^inf |sigma^alpha(./t) applied to f|^2 dt/t)^(1/2).

    The integrand vanishes for t below the smallest active mode radius
    and decays like t^-4 above the largest, so the t-integral is
    truncated at tail_factor times the largest radius (relative
    truncation error ~ tail_factor^-4).  Panels break at the mode radii.
    """
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    spec = forward_dft(f)
    q = f.grid.freq_square_lattice()
    radii = _active_radii(spec)
    if radii.size == 0:
        import warnings

        warnings.warn("stein_g: field has no nonzero-frequency content; result is 0")
        return Field(f.grid, np.zeros(f.grid.shape))
    sig = sigma_profile(alpha)
    if tset is None:
        t_lo = float(radii.min())
        t_hi = float(radii.max()) * tail_factor
        lam_edges = _panel_edges(
            math.log(t_lo), math.log(t_hi),
            [math.log(r) for r in radii], per_octave / math.log(2.0),
        )
        tset = ScaleSet.gl_panels(np.exp(lam_edges), "dt_over_t")
        nodes, wts = tset.values, tset.weights
    else:
        if tset.kind != "dt_over_t":
            raise DomainError("stein_g tset must have kind dt_over_t")
        nodes, wts = tset.values, tset.weights
    acc = np.zeros(f.grid.shape)
    root_q = np.sqrt(q)
    for t, w in zip(nodes, wts):
        sym = sig.eval(root_q / t)
        piece = _apply_symbol(spec, sym)
        acc += w * np.abs(piece.samples) ** 2
    return Field(f.grid, np.sqrt(acc))


def band_piece(f: Field, j: int, t: float, bump: Optional[RadialProfile] = None) -> Field:
    """Multiplier psi(2^j (1 - |xi|^2/t^2)) at dilation t."""
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    if not (t > 0):
        raise DomainError(f"t must be positive, got {t}")
    psi = bump if bump is not None else bump_psi()
    _check_nyquist(f.grid, t, "band_piece")
    spec = forward_dft(f)
    return _band_apply(spec, f.grid.freq_square_lattice(), j, t, psi)


def _band_apply(spec: Spectrum, q: np.ndarray, j: int, t: float, psi: RadialProfile) -> Field:
    sym = psi.eval((2.0**j) * (1.0 - q / (t * t)))
    return _apply_symbol(spec, sym)


def band_interval(j: int, rho: float, psi_support=(0.5, 2.0)) -> tuple[float, float]:
    """t-interval on which psi(2^j (1 - rho^2/t^2)) can be nonzero.

    For j = 1 the upper endpoint is infinite; it is capped where the
    bump argument is within 2^-j/64 of its support edge (the bump
    vanishes to infinite order there).
    """
    lo_arg = psi_support[0] * 2.0 ** (-j)   # smallest 1 - rho^2/t^2
    hi_arg = psi_support[1] * 2.0 ** (-j)   # largest
    t_lo = rho / math.sqrt(1.0 - lo_arg)
    if hi_arg < 1.0:
        t_hi = rho / math.sqrt(1.0 - hi_arg)
    else:
        t_hi = rho / math.sqrt(2.0 ** (-j) / 64.0)
    return t_lo, t_hi


def _band_edges(j: int, radii: np.ndarray, panels_per_band: int) -> np.ndarray | None:
    """Merged panel edges covering all per-radius bands (None if no radii)."""
    radii = np.asarray(radii, dtype=np.float64)
    radii = radii[radii > 0]
    if radii.size == 0:
        return None
    intervals = [band_interval(j, float(r)) for r in radii]
    intervals.sort()
    merged = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1] * (1 + 1e-12):
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    edges = []
    for lo, hi in merged:
        seg = np.linspace(lo, hi, panels_per_band + 1)
        edges.append(seg)
    return edges


def band_sup_grid(j: int, radii: Sequence[float], per_band: int = 13) -> ScaleSet:
    """sup-grid of t values resolving the 2^-j bands around the given radii."""
    groups = _band_edges(j, np.asarray(radii, dtype=np.float64), per_band - 1)
    if groups is None:
        raise DomainError("band_sup_grid needs at least one positive radius")
    vals = np.unique(np.concatenate(groups))
    return ScaleSet(vals, np.zeros_like(vals), "sup_grid")


def band_maximal(
    f: Field, j: int, tset: Optional[ScaleSet] = None, bump: Optional[RadialProfile] = None
) -> Field:
    """sup_t |band_piece(f, j, t)| over an adapted (or given) t grid."""
    psi = bump if bump is not None else bump_psi()
    spec = forward_dft(f)
    q = f.grid.freq_square_lattice()
    if tset is None:
        tset = band_sup_grid(j, _active_radii(spec))
    if tset.kind != "sup_grid":
        raise DomainError("band_maximal tset must be a sup_grid")
    out = np.zeros(f.grid.shape)
    for t in tset.values:
        np.maximum(out, np.abs(_band_apply(spec, q, j, float(t), psi).samples), out=out)
    return Field(f.grid, out)


def g_psi_j(
    f: Field,
    j: int,
    tset: Optional[ScaleSet] = None,
    bump: Optional[RadialProfile] = None,
    panels_per_band: int = 2,
) -> Field:
    """Band square function (int_0^inf |band_piece(f, j, t)|^2 dt/t)^(1/2).

    The integrand is supported on O(2^-j)-wide relative bands around
    the active mode radii; quadrature panels are placed on exactly
    those bands.
    """
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    psi = bump if bump is not None else bump_psi()
    spec = forward_dft(f)
    q = f.grid.freq_square_lattice()
    if tset is None:
        groups = _band_edges(j, _active_radii(spec), 12 * panels_per_band)
        if groups is None:
            return Field(f.grid, np.zeros(f.grid.shape))
        parts = [ScaleSet.gl_panels(g, "dt_over_t") for g in groups]
        nodes = np.concatenate([p.values for p in parts])
        wts = np.concatenate([p.weights for p in parts])
    else:
        if tset.kind != "dt_over_t":
            raise DomainError("g_psi_j tset must have kind dt_over_t")
        nodes, wts = tset.values, tset.weights
    acc = np.zeros(f.grid.shape)
    for t, w in zip(nodes, wts):
        acc += w * np.abs(_band_apply(spec, q, j, float(t), psi).samples) ** 2
    return Field(f.grid, np.sqrt(acc))


def gtilde_psi_j(
    f: Field,
    j: int,
    Rset: Optional[ScaleSet] = None,
    tset: Optional[ScaleSet] = None,
    bump: Optional[RadialProfile] = None,
    panels_per_band: int = 2,
) -> Field:
    """Running-mean variant sup_R ((1/R) int_0^R |band_piece|^2 dt)^(1/2).

    The integrand is band-supported, so per-panel integrals are
    accumulated once and the supremum is taken over all panel edges
    (where the partial sums are exact panel integrals), which resolves
    the O(2^-j)-wide bands without a caller-supplied R grid.  A given
    sup_grid Rset restricts the supremum to edges <= each R instead.
    """
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    psi = bump if bump is not None else bump_psi()
    spec = forward_dft(f)
    q = f.grid.freq_square_lattice()
    groups = _band_edges(j, _active_radii(spec), 12 * panels_per_band)
    if groups is None:
        return Field(f.grid, np.zeros(f.grid.shape))
    if tset is not None and tset.kind != "dt":
        raise DomainError("gtilde_psi_j tset must have kind dt (band nodes)")
    edges = np.unique(np.concatenate(groups))
    # per-panel GL integrals of |band_piece|^2, accumulated in t order
    cumulative = np.zeros((edges.size,) + f.grid.shape)
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:]), start=1):
        mids = 0.5 * (a + b)
        half = 0.5 * (b - a)
        panel = np.zeros(f.grid.shape)
        in_band = any(g[0] <= mids <= g[-1] for g in groups)
        if in_band:
            for node, w in zip(_GL_NODES, _GL_WEIGHTS):
                t = mids + half * node
                panel += (half * w) * np.abs(_band_apply(spec, q, j, float(t), psi).samples) ** 2
        cumulative[i] = cumulative[i - 1] + panel
    if Rset is None:
        r_candidates = edges[1:]
        idx = np.arange(1, edges.size)
    else:
        if Rset.kind != "sup_grid":
            raise DomainError("gtilde_psi_j Rset must be a sup_grid")
        r_candidates = Rset.values
        idx = np.searchsorted(edges, r_candidates, side="right") - 1
    best = np.zeros(f.grid.shape)
    for R, i in zip(r_candidates, idx):
        if i < 1:
            continue
        np.maximum(best, cumulative[min(i, edges.size - 1)] / R, out=best)
    return Field(f.grid, np.sqrt(best))


def l2_opnorm_g_psi_j(
    j: int,
    bump: Optional[RadialProfile] = None,
    tol: float = 1e-12,
    max_doublings: int = 14,
) -> float:
    """Exact L2 -> L2 operator norm of g_psi_j: (int_0^inf psi(2^j(1-s^2))^2 ds/s)^(1/2).

    By Plancherel and scale invariance the norm equals this radius-free
    one-dimensional integral; it is evaluated by panel-doubling
    Gauss-Legendre on the support band.
    """
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    psi = bump if bump is not None else bump_psi()
    lo_arg, hi_arg = psi.support
    s_hi = math.sqrt(max(1.0 - lo_arg * 2.0 ** (-j), 0.0)) if lo_arg * 2.0 ** (-j) < 1 else 0.0
    s_lo_sq = 1.0 - hi_arg * 2.0 ** (-j)
    s_lo = math.sqrt(s_lo_sq) if s_lo_sq > 0 else 1e-12

    def integrand(s):
        return psi.eval((2.0**j) * (1.0 - s * s)) ** 2 / s

    panels = 4
    edges = np.linspace(s_lo, s_hi, panels + 1)
    val = _gl_on_edges(integrand, edges)
    for _ in range(max_doublings):
        panels *= 2
        nxt = _gl_on_edges(integrand, np.linspace(s_lo, s_hi, panels + 1))
        if abs(nxt - val) <= tol * max(abs(nxt), 1e-300):
            return math.sqrt(nxt)
        val = nxt
    return math.sqrt(val)


def _gl_on_edges(fn, edges: np.ndarray) -> float:
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mids[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.dot(wts, fn(nodes)))


def kernel_kj(
    j: int,
    n: int,
    radii: Sequence[float],
    bump: Optional[RadialProfile] = None,
    tol: float = 1e-8,
) -> np.ndarray:
    """Physical-space kernel of the band multiplier psi(2^j (1-|xi|^2)).

    Computed as the n-dimensional radial Fourier transform of the band
    profile, which is supported on the annulus 1-r^2 ~ 2^-j.
    """
    if j < 1:
        raise DomainError(f"j must be >= 1, got {j}")
    psi = bump if bump is not None else bump_psi()
    scale = float(2**j)

    def fn(r):
        return psi.eval(scale * (1.0 - r * r))

    lo = math.sqrt(max(0.0, 1.0 - psi.support[1] / scale))
    hi = math.sqrt(max(0.0, 1.0 - psi.support[0] / scale))
    profile = RadialProfile(fn, (lo, hi), "band annulus")
    return radial_fourier(profile, n, radii, tol=tol)


# ---------------------------------------------------------------------------
# closed-form exponent arithmetic

@dataclass(frozen=True)
class ExponentPredictor:
    """Closed-form exponents for thresholds and decay rates.

    All methods are exact arithmetic on the stated formulas; branch
    selection for the weighted factor follows the printed cases
    (gamma in (1,n) / gamma = 1 / gamma in [0,1)).
    """

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise DomainError("n and k must be >= 1")

    def _check_p(self, p: float) -> None:
        if not (1.0 < p < np.inf):
            raise DomainError(f"p must be in (1, inf), got {p}")

    def alpha_threshold(self, p_list: Sequence[float]) -> float:
        """Sufficient smoothness for k-linear pointwise convergence."""
        if len(p_list) != self.k:
            raise DomainError(f"need {self.k} exponents, got {len(p_list)}")
        total = 0.0
        for p in p_list:
            self._check_p(p)
            total += max(self.n * (1.0 / p - 0.5), self.n * (0.5 - 1.0 / p) - 0.5, 0.0)
        return total + (self.k - 2.0) / 2.0

    def critical_index(self, p_list: Sequence[float]) -> float:
        """Counterexample threshold (2n-1)/(2p) - ((n-1)k+1)/2 with 1/p = sum 1/p_i."""
        if len(p_list) != self.k:
            raise DomainError(f"need {self.k} exponents, got {len(p_list)}")
        inv_p = 0.0
        for p in p_list:
            self._check_p(p)
            inv_p += 1.0 / p
        return (2.0 * self.n - 1.0) / 2.0 * inv_p - ((self.n - 1.0) * self.k + 1.0) / 2.0

    def critical_sign_change_p(self) -> float:
        """p at which the critical index crosses zero: 2(2n-1)/((n-1)k+1)."""
        return 2.0 * (2.0 * self.n - 1.0) / ((self.n - 1.0) * self.k + 1.0)

    def weighted_threshold(self, gamma_list: Sequence[float], p_list: Sequence[float]) -> float:
        """Threshold for the weighted maximal bound: the gamma inputs are
        measured in L2(|x|^-gamma), the rest in plain L^p."""
        if len(gamma_list) + len(p_list) != self.k:
            raise DomainError("gamma_list and p_list must cover all k inputs")
        total = 0.0
        for g in gamma_list:
            if not (0.0 < g < self.n):
                raise DomainError(f"gamma must be in (0, n), got {g}")
            total += max((g - 1.0) / 2.0, 0.0)
        for p in p_list:
            if not (1.0 < p <= 2.0):
                raise DomainError(f"unweighted exponents must be in (1, 2], got {p}")
            total += self.n * (1.0 / p - 0.5)
        return total + (self.k - 2.0) / 2.0

    def band_max_rate(self, p: float) -> float:
        """Growth exponent (n-1)(1/p - 1/2) of the maximal band piece on L^p."""
        if not (1.0 < p <= 2.0):
            raise DomainError(f"p must be in (1, 2], got {p}")
        return (self.n - 1.0) * (1.0 / p - 0.5)

    def gtilde_band_rate(self, p: float) -> float:
        """Growth exponent n(1/p - 1/2) - 1/2 of the running-mean band square fn."""
        if not (1.0 < p <= 2.0):
            raise DomainError(f"p must be in (1, 2], got {p}")
        return self.n * (1.0 / p - 0.5) - 0.5

    def b_star_rate(self, alpha: float, p: float) -> float:
        """Decay exponent -(alpha - 1/4 - n(1/p - 1/2)) of the hybrid maximal op."""
        if not (1.0 < p <= 2.0):
            raise DomainError(f"p must be in (1, 2], got {p}")
        return -(alpha - 0.25 - self.n * (1.0 / p - 0.5))

    def weighted_band_factor(self, j: int, gamma: float) -> float:
        """Weighted-L2 decay factor of the band square function at level j."""
        if j < 1:
            raise DomainError("j must be >= 1")
        if not (0.0 <= gamma < self.n):
            raise DomainError(f"gamma must be in [0, n), got {gamma}")
        if gamma > 1.0:
            return 2.0 ** (-j * (2.0 - gamma) / 2.0)
        if gamma == 1.0:
            return math.sqrt(j * 2.0 ** (-j))
        return 2.0 ** (-j / 2.0)

    def weighted_band_rate(self, gamma: float) -> float:
        """log2 slope of the weighted factor (gamma = 1 carries an extra log)."""
        if not (0.0 <= gamma < self.n):
            raise DomainError(f"gamma must be in [0, n), got {gamma}")
        return -(2.0 - gamma) / 2.0 if gamma > 1.0 else -0.5
