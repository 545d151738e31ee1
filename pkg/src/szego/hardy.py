"""Discrete Hardy space on a periodic window of the real line.

A field is stored by its Fourier-series coefficients ``a_k`` on the retained
frequencies ``xi_k = k * dxi``, ``k = 0..N/2``::

    u(x) = sum_k a_k exp(i xi_k x),   x_j = -L/2 + j L/N.

``L * a_k`` approximates the continuous transform ``u_hat(xi_k)``, which is
what :attr:`SpectralField.hat` returns.  Negative frequencies are never
stored, so every field is Hardy by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .rational import PartialFractions, RationalSymbol


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class FrequencyGrid:
    L: float
    N: int

    def __post_init__(self):
        if not (self.L > 0 and np.isfinite(self.L)):
            raise ValueError(f"domain length must be positive, got {self.L}")
        if self.N <= 0 or self.N % 2:
            raise ValueError(f"number of points must be even and positive, got {self.N}")

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def dxi(self) -> float:
        return 2 * np.pi / self.L

    @property
    def n_modes(self) -> int:
        return self.N // 2 + 1

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L / 2 + self.dx * np.arange(self.N)

    @cached_property
    def xi(self) -> np.ndarray:
        return self.dxi * np.arange(self.n_modes)

    @cached_property
    def _sign(self) -> np.ndarray:
        # exp(i xi_k x_0) with x_0 = -L/2
        return np.where(np.arange(self.n_modes) % 2 == 0, 1.0, -1.0)

    def padded_x(self, factor: int = 2) -> np.ndarray:
        n = factor * self.N
        return -self.L / 2 + self.L / n * np.arange(n)

    def to_physical(self, coeffs: np.ndarray, factor: int = 1) -> np.ndarray:
        """Samples on the (optionally zero-padded) uniform grid."""
        n = factor * self.N
        full = np.zeros(n, dtype=complex)
        full[: self.n_modes] = coeffs * self._sign
        return sfft.ifft(full, norm="forward")

    def from_physical(self, samples: np.ndarray) -> np.ndarray:
        """Nonnegative-frequency coefficients of samples on an n-point grid (n >= N)."""
        n = samples.shape[-1]
        if n < self.N or n % self.N:
            raise GridMismatchError(f"{n} samples do not live on a refinement of N={self.N}")
        return sfft.fft(samples, norm="forward")[..., : self.n_modes] * self._sign

    def dilated(self, gamma: float) -> "FrequencyGrid":
        """Grid carrying u(gamma x): same coefficients, domain L / gamma."""
        return FrequencyGrid(self.L / gamma, self.N)


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: FrequencyGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.grid.n_modes,):
            raise GridMismatchError(f"expected {self.grid.n_modes} coefficients, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.n_modes, dtype=complex))

    @classmethod
    def from_hat(cls, grid: FrequencyGrid, hat: np.ndarray) -> "SpectralField":
        return cls(grid, np.asarray(hat) / grid.L)

    @property
    def hat(self) -> np.ndarray:
        return self.grid.L * self.coeffs

    @cached_property
    def physical(self) -> np.ndarray:
        out = self.grid.to_physical(self.coeffs)
        out.setflags(write=False)
        return out

    def padded(self, factor: int = 2) -> np.ndarray:
        return self.grid.to_physical(self.coeffs, factor)

    def _check(self, other: "SpectralField"):
        if other.grid != self.grid:
            raise GridMismatchError(f"{self.grid} vs {other.grid}")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, s):
        return SpectralField(self.grid, s * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def translated(self, x0: float) -> "SpectralField":
        """u(x - x0), exact on the grid."""
        return SpectralField(self.grid, self.coeffs * np.exp(-1j * self.grid.xi * x0))

    def dilated(self, beta: float, gamma: float) -> "SpectralField":
        """beta * u(gamma x); the grid is rescaled so the coefficients keep their index."""
        return SpectralField(self.grid.dilated(gamma), beta * self.coeffs)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))


def project_szego(f, grid: FrequencyGrid | None = None) -> SpectralField:
    """Szego projector: zero the negative frequencies, keep k >= 0 (zero mode in full).

    ``f`` is a SpectralField (returned unchanged) or an array of physical
    samples on ``grid`` or on an integer refinement of it.
    """
    if isinstance(f, SpectralField):
        if grid is not None and f.grid != grid:
            raise GridMismatchError(f"field lives on {f.grid}, target {grid}")
        return f
    if grid is None:
        raise ValueError("a grid is required for physical samples")
    samples = np.asarray(f, dtype=complex)
    if samples.ndim != 1:
        raise GridMismatchError("expected a 1-D array of samples")
    return SpectralField(grid, grid.from_physical(samples))


def synth_rational(sym: RationalSymbol, grid: FrequencyGrid) -> SpectralField:
    """Spectral samples of a rational symbol from its closed-form transform.

    The zero mode takes the limit from xi > 0.
    """
    if not isinstance(sym, RationalSymbol):
        raise ValueError("synthesis needs a symbol with all poles in the lower half-plane")
    return SpectralField.from_hat(grid, sym.fourier(grid.xi, zero="right"))


# text snapshot format ---------------------------------------------------

def write_field(u: SpectralField, path: str | Path, header_comments: list[str] | None = None) -> None:
    lines = [f"# {c}" for c in header_comments or []]
    lines.append(f"{float(u.grid.L)!r} {int(u.grid.N)}")
    lines.extend(f"{k} {float(a.real)!r} {float(a.imag)!r}" for k, a in enumerate(u.coeffs))
    Path(path).write_text("\n".join(lines) + "\n")


def read_field(path: str | Path) -> SpectralField:
    rows = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    L, N = rows[0].split()
    grid = FrequencyGrid(float(L), int(N))
    coeffs = np.zeros(grid.n_modes, dtype=complex)
    for ln in rows[1:]:
        k, re, im = ln.split()
        coeffs[int(k)] = complex(float(re), float(im))
    return SpectralField(grid, coeffs)


def evaluate_on_grid(f: PartialFractions, grid: FrequencyGrid) -> np.ndarray:
    """Pointwise values at the physical nodes (no periodisation)."""
    return f(grid.x)
