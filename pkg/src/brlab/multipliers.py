"""Radial symbol profiles and their dyadic decompositions.

The library works with one-dimensional profiles r -> m(r) evaluated at
exact lattice frequency radii.  This module provides the Bochner-Riesz
profile (1-r^2)_+^alpha, the square-function symbol r^2 (1-r^2)_+^alpha,
a smooth dyadic bump psi with supp psi in (1/2, 2) satisfying

    sum_{j in Z} psi(2^-j t) = 1   for every t > 0,

and the dyadic pieces obtained by localizing a profile where 1 - r^2
is of size 2^-j.

The bump is built from a smooth cutoff chi with chi = 1 on [-1, 1] and
supp chi in (-2, 2) by psi(t) = chi(t) - chi(2t), so the partition sum
telescopes exactly.  chi itself uses the algebraically normalized
exponential step e(v) = g(v) / (g(v) + g(1-v)) with g(v) = exp(-1/v);
this is closed-form, infinitely smooth, and cheap enough to sample at
every lattice point of a product grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError

__all__ = [
    "RadialProfile",
    "DyadicPiece",
    "MultilinearSymbol",
    "smooth_step",
    "smooth_cutoff",
    "bump_psi",
    "window_bump",
    "br_profile",
    "sigma_profile",
    "dyadic_sigma_piece",
    "m_alpha_j_symbol",
]


def smooth_step(v) -> np.ndarray:
    """C-infinity step: 0 for v <= 0, 1 for v >= 1, strictly rising between."""
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros_like(v)
    out[v >= 1.0] = 1.0
    mid = (v > 0.0) & (v < 1.0)
    if np.any(mid):
        u = v[mid]
        a = np.exp(-1.0 / u)
        b = np.exp(-1.0 / (1.0 - u))
        out[mid] = a / (a + b)
    return out


def smooth_cutoff(t) -> np.ndarray:
    """chi: identically 1 on [-1, 1], supported in (-2, 2), smooth."""
    return 1.0 - smooth_step(np.abs(np.asarray(t, dtype=np.float64)) - 1.0)


@dataclass(frozen=True)
class RadialProfile:
    """A compactly supported radial symbol profile.

    ``fn`` is a closed-form vectorized evaluator; ``support`` = [a, b]
    is an interval outside which the profile vanishes identically.
    Profiles are evaluated pointwise at lattice radii, never sampled
    onto an intermediate table.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    support: Tuple[float, float]
    smoothness_note: str = ""

    def __post_init__(self):
        a, b = self.support
        if not (a <= b):
            raise DomainError(f"empty support interval {self.support}")

    def eval(self, r) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(r, dtype=np.float64)))

    __call__ = eval


def bump_psi() -> RadialProfile:
    """The dyadic bump psi(t) = chi(t) - chi(2t).

    Vanishes outside (1/2, 2) (including all t <= 1/2, so it is safe to
    feed it negative arguments), equals 1 at t = 1, and its dyadic
    dilates partition unity on (0, inf).
    """

    def fn(t):
        return smooth_cutoff(t) - smooth_cutoff(2.0 * t)

    return RadialProfile(fn=fn, support=(0.5, 2.0), smoothness_note="C-infinity bump")


def window_bump() -> RadialProfile:
    """Even smooth bump supported in [-1, 1] with value 1 at 0.

    Used as the profile of localized test functions; evaluate at |u|.
    """

    def fn(u):
        u = np.abs(np.asarray(u, dtype=np.float64))
        out = np.zeros_like(u)
        inside = u < 1.0
        if np.any(inside):
            w = u[inside]
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - w * w))
        return out

    return RadialProfile(fn=fn, support=(0.0, 1.0), smoothness_note="C-infinity window")


def br_profile(alpha: float) -> RadialProfile:
    """(1 - r^2)_+^alpha.  For alpha = 0 this is the indicator of [0, 1)."""
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")

    def fn(r):
        base = 1.0 - r * r
        if alpha == 0:
            return np.where(base > 0.0, 1.0, 0.0)
        return np.where(base > 0.0, np.power(np.maximum(base, 0.0), alpha), 0.0)

    return RadialProfile(fn=fn, support=(0.0, 1.0), smoothness_note=f"C^{alpha} at r=1")


def sigma_profile(alpha: float) -> RadialProfile:
    """r^2 (1 - r^2)_+^alpha, the square-function symbol."""
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    base_profile = br_profile(alpha)

    def fn(r):
        r = np.asarray(r, dtype=np.float64)
        return r * r * base_profile.eval(r)

    return RadialProfile(fn=fn, support=(0.0, 1.0), smoothness_note="vanishes at 0 and 1")


@dataclass(frozen=True)
class DyadicPiece:
    """A dyadically localized piece of a radial profile.

    ``kind`` is one of ``sigma_j`` (j >= 1 band), ``zero_piece`` (the
    j = 0 residual), or ``m_last_block_j`` (multilinear block piece,
    carried by MultilinearSymbol instead of ``profile``).
    """

    base: RadialProfile
    j: int
    kind: str
    profile: RadialProfile = field(repr=False, default=None)

    def eval(self, r) -> np.ndarray:
        return self.profile.eval(r)


def dyadic_sigma_piece(alpha: float, j: int, bump: Optional[RadialProfile] = None) -> DyadicPiece:
    """Piece of sigma^alpha localized at 1 - r^2 ~ 2^-j.

    For j >= 1 this is sigma^alpha(r) * psi(2^j (1 - r^2)); the j = 0
    piece is the residual sigma^alpha(r) * psi(1 - r^2), supported in
    r <= 1/sqrt(2).
    """
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}")
    sig = sigma_profile(alpha)
    psi = bump if bump is not None else bump_psi()

    if j == 0:
        def fn(r):
            r = np.asarray(r, dtype=np.float64)
            return sig.eval(r) * psi.eval(1.0 - r * r)

        support = (0.0, 1.0 / np.sqrt(2.0))
        return DyadicPiece(base=sig, j=0, kind="zero_piece",
                           profile=RadialProfile(fn, support, "residual piece"))

    scale = float(2**j)

    def fn(r):
        r = np.asarray(r, dtype=np.float64)
        return sig.eval(r) * psi.eval(scale * (1.0 - r * r))

    lo = np.sqrt(max(0.0, 1.0 - psi.support[1] / scale))
    hi = np.sqrt(max(0.0, 1.0 - psi.support[0] / scale))
    return DyadicPiece(base=sig, j=j, kind="sigma_j",
                       profile=RadialProfile(fn, (lo, hi), "dyadic band"))


@dataclass(frozen=True)
class MultilinearSymbol:
    """Block-localized multilinear Bochner-Riesz symbol.

    Evaluates (1-|xi|^2)_+^alpha * psi(2^j (1-|xi_block|^2)) for j >= 1,
    or the telescoping residual for j = 0, as a function of the squared
    total radius and the squared block radius.
    """

    alpha: float
    j: int
    k: int
    block: int
    bump: RadialProfile = field(repr=False, default=None)

    def eval(self, q_total: np.ndarray, q_block: np.ndarray) -> np.ndarray:
        q = np.asarray(q_total, dtype=np.float64)
        qb = np.asarray(q_block, dtype=np.float64)
        base = 1.0 - q
        if self.alpha == 0:
            m = np.where(base > 0.0, 1.0, 0.0)
        else:
            m = np.where(base > 0.0, np.power(np.maximum(base, 0.0), self.alpha), 0.0)
        s = 1.0 - qb
        if self.j >= 1:
            return m * self.bump.eval((2.0**self.j) * s)
        # residual: 1 - sum_{j>=1} psi(2^j s) telescopes to 1 - chi(2s) for s > 0
        tail = np.where(s > 0.0, smooth_cutoff(2.0 * s), 0.0)
        return m * (1.0 - tail)


def m_alpha_j_symbol(alpha: float, j: int, k: int, block: int,
                     bump: Optional[RadialProfile] = None) -> MultilinearSymbol:
    """Symbol (xi_1,...,xi_k) -> (1-|xi|^2)_+^alpha psi(2^j (1-|xi_block|^2)).

    j = 0 returns the residual piece so that the pieces sum back to the
    plain symbol wherever 1-|xi_block|^2 exceeds 2^-J.
    """
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not 1 <= block <= k:
        raise DomainError(f"block must be in 1..{k}, got {block}")
    psi = bump if bump is not None else bump_psi()
    return MultilinearSymbol(alpha=alpha, j=j, k=k, block=block, bump=psi)
