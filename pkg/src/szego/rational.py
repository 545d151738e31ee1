"""Exact arithmetic on proper rational functions stored as partial fractions.

A function is kept as ``sum_j sum_m c[j][m-1] / (x - p_j)**m``.  Products,
conjugation on the real line, the Szego projection and all Hardy-space
integrals are computed in closed form, so these objects serve as the
independent reference for everything computed on a grid.

Fourier convention: ``f_hat(xi) = int f(x) exp(-i x xi) dx``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

# poles closer than this (relative to their size) are treated as equal
POLE_MERGE_TOL = 1e-12


def _same_pole(a: complex, b: complex) -> bool:
    return abs(a - b) <= POLE_MERGE_TOL * max(1.0, abs(a), abs(b))


def _pair_product(a: complex, m: int, b: complex, n: int) -> list[tuple[complex, int, complex]]:
    """Partial fractions of 1/((x-a)^m (x-b)^n) as (pole, order, coefficient)."""
    if _same_pole(a, b):
        return [(a, m + n, 1.0 + 0j)]
    out = []
    d = a - b
    for i in range(1, m + 1):
        k = m - i
        out.append((a, i, comb(n + k - 1, k) * (-1) ** k * d ** (-(n + k))))
    for j in range(1, n + 1):
        k = n - j
        out.append((b, j, comb(m + k - 1, k) * (-1) ** k * (-d) ** (-(m + k))))
    return out


@dataclass(frozen=True)
class PartialFractions:
    """Proper rational function with poles off the real axis."""

    poles: tuple[complex, ...]
    coeffs: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        if len(self.poles) != len(self.coeffs):
            raise ValueError("poles and coefficient lists differ in length")
        for p in self.poles:
            if not np.isfinite(p):
                raise ValueError(f"non-finite pole {p}")
            if p.imag == 0:
                raise ValueError(f"pole {p} lies on the real axis")

    # construction -------------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, int, complex]], rtol: float = 1e-13):
        """Collect (pole, order, coefficient) triples, merging equal poles and
        dropping negligible coefficients."""
        poles: list[complex] = []
        table: list[dict[int, complex]] = []
        for p, m, c in terms:
            p = complex(p)
            for idx, q in enumerate(poles):
                if _same_pole(p, q):
                    table[idx][m] = table[idx].get(m, 0) + c
                    break
            else:
                poles.append(p)
                table.append({m: complex(c)})
        scale = max((abs(c) for t in table for c in t.values()), default=0.0)
        out_p, out_c = [], []
        for p, t in zip(poles, table):
            top = max(t)
            cs = [t.get(m, 0j) for m in range(1, top + 1)]
            while cs and abs(cs[-1]) <= rtol * scale:
                cs.pop()
            if cs:
                out_p.append(p)
                out_c.append(tuple(complex(c) for c in cs))
        return cls(tuple(out_p), tuple(out_c))

    @classmethod
    def zero(cls):
        return cls((), ())

    def terms(self):
        for p, cs in zip(self.poles, self.coeffs):
            for m, c in enumerate(cs, start=1):
                if c != 0:
                    yield p, m, c

    @property
    def degree(self) -> int:
        return sum(len(cs) for cs in self.coeffs)

    # algebra --------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, PartialFractions):
            return NotImplemented
        return self._like(PartialFractions.from_terms([*self.terms(), *other.terms()]))

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, other):
        if isinstance(other, PartialFractions):
            terms = []
            for a, m, c in self.terms():
                for b, n, d in other.terms():
                    terms.extend((q, k, c * d * e) for q, k, e in _pair_product(a, m, b, n))
            return self._like(PartialFractions.from_terms(terms))
        if np.isscalar(other):
            return self._like(PartialFractions.from_terms((p, m, other * c) for p, m, c in self.terms()))
        return NotImplemented

    __rmul__ = __mul__

    def _like(self, pf: "PartialFractions") -> "PartialFractions":
        return pf

    def conj(self) -> "PartialFractions":
        """Complex conjugate as a function on the real line."""
        return PartialFractions.from_terms((np.conj(p), m, np.conj(c)) for p, m, c in self.terms())

    def derivative(self) -> "PartialFractions":
        return self._like(PartialFractions.from_terms((p, m + 1, -m * c) for p, m, c in self.terms()))

    def D(self) -> "PartialFractions":
        """D = -i d/dx."""
        return -1j * self.derivative()

    def project(self) -> "RationalSymbol":
        """Szego projection: keep the lower-half-plane poles."""
        return RationalSymbol.from_terms((p, m, c) for p, m, c in self.terms() if p.imag < 0)

    def abs2(self) -> "PartialFractions":
        return self * self.conj()

    # evaluation -----------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape, dtype=complex)
        for p, m, c in self.terms():
            out += c / (x - p) ** m
        return out

    def fourier(self, xi, zero: str = "mean"):
        """Fourier transform at real frequencies.

        Lower-half-plane poles contribute on xi > 0, upper ones on xi < 0.  At
        xi = 0 the transform of a 1/(x-p) term jumps; ``zero="mean"`` returns
        the average of the one-sided limits, ``zero="right"`` the limit from
        xi > 0.
        """
        xi = np.asarray(xi, dtype=float)
        pos = np.zeros(xi.shape, dtype=complex)
        neg = np.zeros(xi.shape, dtype=complex)
        for p, m, c in self.terms():
            poly = (-1j * xi) ** (m - 1) / factorial(m - 1)
            val = c * poly * np.exp(-1j * p * xi)
            if p.imag < 0:
                pos += -2j * np.pi * val
            else:
                neg += 2j * np.pi * val
        out = np.where(xi > 0, pos, np.where(xi < 0, neg, 0))
        at0 = xi == 0
        if np.any(at0):
            if zero == "right":
                out = np.where(at0, pos, out)
            elif zero == "mean":
                out = np.where(at0, 0.5 * (pos + neg), out)
            else:
                raise ValueError(f"unknown zero-frequency rule {zero!r}")
        return out


def _term_inner(p, m, c, q, n, d, weight_power: int) -> complex:
    """(1/2pi) int_0^inf xi^w f_hat conj(g_hat) for single Hardy terms."""
    k = m + n - 2 + weight_power
    s = 1j * (p - np.conj(q))
    const = c * np.conj(d) * 4 * np.pi**2 * (-1j) ** (m - 1) * (1j) ** (n - 1)
    const /= factorial(m - 1) * factorial(n - 1)
    return const * factorial(k) / s ** (k + 1) / (2 * np.pi)


@dataclass(frozen=True)
class RationalSymbol(PartialFractions):
    """Element of M(N): all poles in the lower half-plane."""

    def __post_init__(self):
        super().__post_init__()
        for p, cs in zip(self.poles, self.coeffs):
            if not p.imag < 0:
                raise ValueError(f"pole {p} is not in the lower half-plane")
            if len(cs) == 0 or cs[-1] == 0:
                raise ValueError(f"top coefficient at pole {p} vanishes")
        for i, a in enumerate(self.poles):
            for b in self.poles[i + 1 :]:
                if _same_pole(a, b):
                    raise ValueError(f"repeated pole {a}")

    @classmethod
    def from_terms(cls, terms, rtol: float = 1e-13):
        pf = PartialFractions.from_terms(terms, rtol)
        return cls(pf.poles, pf.coeffs)

    @classmethod
    def simple(cls, C: complex, p: complex) -> "RationalSymbol":
        """C / (x - p)."""
        return cls((complex(p),), ((complex(C),),))

    @classmethod
    def from_poles(cls, poles: Sequence[complex], coeffs: Sequence[Sequence[complex]]):
        return cls(tuple(complex(p) for p in poles), tuple(tuple(complex(c) for c in cs) for cs in coeffs))

    def _like(self, pf):
        if all(p.imag < 0 for p in pf.poles):
            return RationalSymbol(pf.poles, pf.coeffs)
        return pf

    def inner(self, other: "RationalSymbol", weight_power: int = 0) -> complex:
        """(1/2pi) int_0^inf xi^w u_hat conj(v_hat) dxi; w=0 is the L2 product."""
        return sum(
            (_term_inner(p, m, c, q, n, d, weight_power) for p, m, c in self.terms() for q, n, d in other.terms()),
            0j,
        )

    def Q(self) -> float:
        return float(self.inner(self, 0).real)

    def M(self) -> float:
        return float(self.inner(self, 1).real)

    def E(self) -> float:
        sq = self * self
        return sq.Q() if isinstance(sq, RationalSymbol) else 0.0

    def l2_norm(self) -> float:
        return float(np.sqrt(self.Q()))

    def hdot_half_norm(self) -> float:
        return float(np.sqrt(self.M()))


def traveling_wave_residual(u: RationalSymbol, c: float, omega: float) -> float:
    """Exact relative L2 residual of c D u + omega u - Pi(|u|^2 u)."""
    nonlinear = (u * u.conj() * u).project()
    res = c * u.D() + omega * u - nonlinear
    if not isinstance(res, RationalSymbol):
        res = res.project()
    q = u.Q()
    return float(np.sqrt(max(res.Q(), 0.0) / q)) if q > 0 else 0.0
