"""Conserved quantities and norms of grid fields.

Two quadratures are offered.

``torus``
    Plain sums over the retained modes and trapezoid sums on the padded
    physical grid.  These are the exact invariants of the semi-discrete
    flow, so they are what drift monitoring uses.

``line``
    Treats ``u.hat`` as samples of the continuous transform on [0, inf) and
    integrates with left-end Gregory corrections (fourth order).  E is
    obtained from the transform of u**2, itself a Gregory-corrected
    convolution.  These approximate the integrals on the real line and are
    what comparisons with closed forms use; the periodic window otherwise
    costs O(1/L).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .hardy import SpectralField
from .rational import RationalSymbol

GREGORY_LEFT = np.array([3 / 8, 7 / 6, 23 / 24])
# closed Newton-Cotes weights on m+1 unit-spaced nodes, m = 0..4
_NEWTON_COTES = {
    0: np.array([0.0]),
    1: np.array([0.5, 0.5]),
    2: np.array([1, 4, 1]) / 3,
    3: np.array([3, 9, 9, 3]) / 8,
    4: np.array([7, 32, 12, 32, 7]) * 2 / 45,
}

MEASURES = ("torus", "line")


@dataclass(frozen=True)
class Invariants:
    Q: float
    M: float
    E: float

    def as_tuple(self):
        return self.Q, self.M, self.E


def gregory_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    k = min(n, 3)
    w[:k] = GREGORY_LEFT[:k]
    return w


@lru_cache(maxsize=16)
def _conv_corrections(n: int):
    """Sparse (m, j, c_mj - 1) for the corrected convolution of length-n inputs."""
    ms, js, ds = [], [], []
    for m in range(min(5, 2 * n - 1)):
        c = _NEWTON_COTES[m]
        for j in range(m + 1):
            if j < n and m - j < n:
                ms.append(m), js.append(j), ds.append(c[j] - 1)
    m = np.arange(5, 2 * n - 1)
    for j_off, g in enumerate(GREGORY_LEFT):
        d = g - 1
        for j in (np.full_like(m, j_off), m - j_off):
            ok = (j < n) & (m - j < n) & (j >= 0)
            ms.extend(m[ok]), js.extend(j[ok]), ds.extend(np.full(ok.sum(), d))
    return np.array(ms, dtype=int), np.array(js, dtype=int), np.array(ds)


def _square_transform(uh: np.ndarray, h: float) -> np.ndarray:
    """Samples of the transform of u**2, (1/2pi) (u_hat * u_hat), on the same spacing."""
    n = uh.size
    size = sfft.next_fast_len(2 * n - 1)
    f = sfft.fft(uh, size)
    s = sfft.ifft(f * f)[: 2 * n - 1]
    ms, js, ds = _conv_corrections(n)
    np.add.at(s, ms, ds * uh[js] * uh[ms - js])
    return h / (2 * np.pi) * s


def line_invariants(u: SpectralField) -> Invariants:
    uh = u.hat
    h = u.grid.dxi
    W = gregory_weights(uh.size)
    a2 = np.abs(uh) ** 2
    Q = h / (2 * np.pi) * np.sum(W * a2)
    M = h / (2 * np.pi) * np.sum(W * u.grid.xi * a2)
    w = _square_transform(uh, h)
    E = h / (2 * np.pi) * np.sum(gregory_weights(w.size) * np.abs(w) ** 2)
    return Invariants(float(Q), float(M), float(E))


def line_energy_gradient(u: SpectralField) -> np.ndarray:
    """Riesz gradient of the line E in the weighted product (h/2pi) sum W f conj(g)."""
    uh = u.hat
    n = uh.size
    h = u.grid.dxi
    w = _square_transform(uh, h)
    z = gregory_weights(w.size) * w
    size = sfft.next_fast_len(len(z) + n)
    # corr[k] = sum_i z[k+i] conj(uh[i])
    corr = sfft.ifft(sfft.fft(z, size) * np.conj(sfft.fft(uh, size)))[:n]
    ms, js, ds = _conv_corrections(n)
    np.add.at(corr, js, ds * z[ms] * np.conj(uh[ms - js]))
    g = 2 * (h / (2 * np.pi)) ** 2 * corr
    return 2 * g * (2 * np.pi) / (h * gregory_weights(n))


def torus_invariants(u: SpectralField) -> Invariants:
    a2 = np.abs(u.coeffs) ** 2
    L = u.grid.L
    Q = L * np.sum(a2)
    M = L * np.sum(u.grid.xi * a2)
    up = u.padded(2)
    E = L * np.mean(np.abs(up) ** 4)
    return Invariants(float(Q), float(M), float(E))


def conserved_quantities(u, measure: str = "torus") -> Invariants:
    """(Q, M, E).  Rational symbols are integrated exactly."""
    if isinstance(u, RationalSymbol):
        return Invariants(u.Q(), u.M(), u.E())
    if not u.is_finite():
        raise FloatingPointError("non-finite amplitudes")
    if measure == "torus":
        return torus_invariants(u)
    if measure == "line":
        return line_invariants(u)
    raise ValueError(f"unknown measure {measure!r}")


def mode_weights(u: SpectralField, measure: str) -> np.ndarray:
    """Per-mode weights so that ||u||^2 = sum weights * |coeffs|^2 for the L2 norm."""
    n = u.grid.n_modes
    if measure == "torus":
        return np.full(n, u.grid.L)
    if measure == "line":
        return u.grid.L * gregory_weights(n)
    raise ValueError(f"unknown measure {measure!r}")


def sobolev_weight(xi: np.ndarray, kind: str, s: float | None = None) -> np.ndarray:
    if kind == "L2":
        return np.ones_like(xi)
    if kind == "hdot_half":
        return np.abs(xi)
    if kind == "sobolev":
        if s is None or s < 0:
            raise ValueError("sobolev norm needs s >= 0")
        return (1 + xi**2) ** s
    raise ValueError(f"unknown norm kind {kind!r}")


def inner(u: SpectralField, v: SpectralField, kind: str = "L2", s: float | None = None, measure: str = "torus"):
    u._check(v)
    w = mode_weights(u, measure) * sobolev_weight(u.grid.xi, kind, s)
    return complex(np.sum(w * u.coeffs * np.conj(v.coeffs)))


def norm(u, kind: str = "L2", s: float | None = None, measure: str = "torus") -> float:
    """L2, L4, homogeneous H^{1/2} ("hdot_half") or inhomogeneous H^s ("sobolev")."""
    if isinstance(u, RationalSymbol):
        if kind == "L2":
            return u.l2_norm()
        if kind == "hdot_half":
            return u.hdot_half_norm()
        if kind == "L4":
            return u.E() ** 0.25
        raise ValueError(f"{kind!r} is not available in closed form")
    if kind == "L4":
        return conserved_quantities(u, measure).E ** 0.25
    w = mode_weights(u, measure) * sobolev_weight(u.grid.xi, kind, s)
    return float(np.sqrt(np.sum(w * np.abs(u.coeffs) ** 2)))
