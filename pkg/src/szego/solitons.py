"""Traveling waves: line solitons C/(x-p) and their periodic counterparts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hardy import FrequencyGrid, SpectralField, synth_rational
from .rational import RationalSymbol

DEFAULT_GRID = FrequencyGrid(256.0, 4096)


@dataclass(frozen=True)
class SolitonParams:
    """C/(x-p) with Im p < 0 and its closed-form invariants on the line."""

    C: complex
    p: complex

    def __post_init__(self):
        if not self.p.imag < 0:
            raise ValueError(f"soliton pole must satisfy Im p < 0, got {self.p}")
        object.__setattr__(self, "C", complex(self.C))
        object.__setattr__(self, "p", complex(self.p))

    @property
    def a(self) -> float:
        return abs(self.C)

    @property
    def r(self) -> float:
        return -self.p.imag

    @property
    def Q(self) -> float:
        return np.pi * self.a**2 / self.r

    @property
    def M(self) -> float:
        return np.pi * self.a**2 / (2 * self.r**2)

    @property
    def E(self) -> float:
        return np.pi * self.a**4 / (2 * self.r**3)

    @property
    def c(self) -> float:
        return self.Q / (2 * np.pi)

    @property
    def omega(self) -> float:
        # M/(2 pi); the alternative |C|^4 / (4 r^3) fails the residue check unless |C|^2 = r
        return self.M / (2 * np.pi)

    @property
    def singular_value(self) -> float:
        """Nonzero Takagi value of the Hankel operator, sqrt(M / 2 pi)."""
        return self.a / (2 * self.r)

    def symbol(self) -> RationalSymbol:
        return RationalSymbol.simple(self.C, self.p)

    def periodic_speeds(self, grid: FrequencyGrid) -> tuple[float, float]:
        """(c, omega) of the synthesized field, which is exactly a periodic traveling wave.

        Summing the closed-form transform over k >= 0 gives
        (2 pi i C q / L) / (z - q) with z = exp(2 pi i x / L), q = exp(2 pi i p / L).
        """
        kappa = grid.dxi
        q = np.exp(1j * kappa * self.p)
        A = 2j * np.pi * self.C * q / grid.L
        return circle_speeds(A, q, grid)


def make_soliton(C: complex, p: complex, grid: FrequencyGrid = DEFAULT_GRID):
    params = SolitonParams(complex(C), complex(p))
    return params, synth_rational(params.symbol(), grid)


def circle_speeds(C: complex, p_disk: complex, grid: FrequencyGrid) -> tuple[float, float]:
    """Closed-form (c, omega) of C/(exp(2 pi i x/L) - p_disk), |p_disk| > 1."""
    kappa = grid.dxi
    g = abs(p_disk) ** 2 - 1
    A2 = abs(C) ** 2
    c = A2 / (kappa * g)
    omega = A2 / g + A2 / g**2
    return float(c), float(omega)


def circle_soliton_field(C: complex, p_disk: complex, grid: FrequencyGrid) -> SpectralField:
    if not abs(p_disk) > 1:
        raise ValueError(f"|p_disk| must exceed 1, got {abs(p_disk)}")
    k = np.arange(grid.n_modes)
    # 1/(z - p) = -sum_k z^k / p^(k+1)
    with np.errstate(under="ignore"):
        coeffs = -C * np.exp(-(k + 1) * np.log(complex(p_disk)))
    return SpectralField(grid, coeffs)
