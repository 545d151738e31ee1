"""Discretized Hankel and Toeplitz operators and the identities they satisfy.

Conventions
-----------
A function h in L^2_+ is represented by the vector ``sqrt(w/2pi) * h_hat(nodes)``
so that Euclidean norms approximate L^2 norms.  In these coordinates

* the Hankel operator acts antilinearly, ``H(h) = M @ conj(h)`` with
  ``M[i, j] = (w/2pi) u_hat(nodes[i] + nodes[j])`` (complex symmetric);
* the Toeplitz operator acts linearly, ``T[i, j] = (w/2pi) b_hat(nodes[i] - nodes[j])``.

Composition rules used throughout (this is the only place they live)::

    H_u T          ->  M @ conj(T)
    T H_u          ->  T @ M
    H_u H_v        ->  M_u @ conj(M_v)        (linear)
    H_u^3          ->  M @ conj(M) @ M        (antilinear)

Two node layouts are used.  Rational symbols get midpoint nodes
``(i + 1/2) w`` with ``w = cutoff / size``, a second-order Nystrom rule for
the operators on the line.  Grid fields get the integer nodes ``k dxi``;
then ``M[i, j] = a_{i+j}`` and ``T[i, j] = b_{i-j}`` are the exact periodic
operators and the algebraic identities hold to rounding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .hardy import FrequencyGrid, SpectralField
from .rational import PartialFractions, RationalSymbol

DEFAULT_CUTOFF = 40.0
DEFAULT_SIZE = 2048
RANK_TOL = 1e-8


class UnderResolvedError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HankelOperator:
    cutoff: float
    size: int
    matrix: np.ndarray
    nodes: np.ndarray
    spacing: float
    provenance: str
    grid: FrequencyGrid | None = None

    def apply(self, h: np.ndarray) -> np.ndarray:
        return self.matrix @ np.conj(h)

    def vector(self, f) -> np.ndarray:
        """Node vector of a rational symbol or a field on the same grid."""
        return node_vector(f, self.nodes, self.spacing)

    def to_text(self, path: str | Path) -> None:
        lines = [f"{float(self.cutoff)!r} {int(self.size)} {self.provenance}"]
        lines.extend(f"{float(z.real)!r} {float(z.imag)!r}" for z in self.matrix.ravel())
        Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True, eq=False)
class ToeplitzOperator:
    cutoff: float
    size: int
    matrix: np.ndarray
    nodes: np.ndarray
    spacing: float
    symbol: str = field(default="")

    def apply(self, h: np.ndarray) -> np.ndarray:
        return self.matrix @ h


def read_hankel_text(path: str | Path) -> tuple[float, int, str, np.ndarray]:
    rows = Path(path).read_text().split("\n")
    cutoff, size, prov = rows[0].split()
    size = int(size)
    vals = np.loadtxt(rows[1 : 1 + size * size], ndmin=2)
    return float(cutoff), size, prov, (vals[:, 0] + 1j * vals[:, 1]).reshape(size, size)


def node_vector(f, nodes: np.ndarray, spacing: float) -> np.ndarray:
    scale = np.sqrt(spacing / (2 * np.pi))
    if isinstance(f, PartialFractions):
        return scale * f.fourier(nodes, zero="right")
    if isinstance(f, SpectralField):
        k = np.rint(nodes / f.grid.dxi).astype(int)
        return scale * f.hat[k]
    raise TypeError(f"cannot sample {type(f).__name__}")


def _midpoint_nodes(cutoff: float, size: int) -> tuple[np.ndarray, float]:
    if not cutoff > 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    if size < 1:
        raise ValueError("size must be >= 1")
    w = cutoff / size
    return (np.arange(size) + 0.5) * w, w


def default_field_size(grid: FrequencyGrid) -> int:
    """Largest size whose index sums stay on the retained modes."""
    return (grid.n_modes + 1) // 2


def build_hankel(source, cutoff: float | None = None, size: int | None = None) -> HankelOperator:
    if isinstance(source, RationalSymbol):
        cutoff = DEFAULT_CUTOFF if cutoff is None else cutoff
        size = DEFAULT_SIZE if size is None else size
        nodes, w = _midpoint_nodes(cutoff, size)
        s = nodes[:, None] + nodes[None, :]
        matrix = w / (2 * np.pi) * source.fourier(s)
        return HankelOperator(cutoff, size, matrix, nodes, w, "rational")
    if isinstance(source, SpectralField):
        grid = source.grid
        if size is None:
            size = default_field_size(grid) if cutoff is None else int(np.floor(cutoff / grid.dxi)) + 1
        if cutoff is not None and not cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {cutoff}")
        if 2 * (size - 1) > grid.n_modes - 1:
            raise UnderResolvedError(
                f"size {size} needs modes up to {2 * (size - 1)}, field keeps {grid.n_modes - 1}"
            )
        idx = np.arange(size)
        matrix = source.coeffs[idx[:, None] + idx[None, :]]
        return HankelOperator(float(idx[-1] * grid.dxi), size, matrix, idx * grid.dxi, grid.dxi, "field", grid)
    raise TypeError(f"unsupported Hankel source {type(source).__name__}")


def build_toeplitz(b, cutoff: float | None = None, size: int | None = None,
                   grid: FrequencyGrid | None = None, like: HankelOperator | None = None) -> ToeplitzOperator:
    """Toeplitz operator of a real symbol.

    ``b`` is a PartialFractions function (exact transform), a SpectralField u
    (meaning b = |u|^2, computed alias free), or real physical samples on
    ``grid``.  ``like`` copies the node layout of an existing Hankel operator.
    """
    if like is not None:
        cutoff, size = like.cutoff, like.size
        if like.grid is not None:
            grid = like.grid
    if isinstance(b, PartialFractions):
        if like is not None and like.provenance == "field":
            raise ValueError("rational symbols use midpoint nodes")
        cutoff = DEFAULT_CUTOFF if cutoff is None else cutoff
        size = DEFAULT_SIZE if size is None else size
        nodes, w = _midpoint_nodes(cutoff, size)
        diff = nodes[:, None] - nodes[None, :]
        matrix = w / (2 * np.pi) * b.fourier(diff, zero="mean")
        return ToeplitzOperator(cutoff, size, matrix, nodes, w, "rational")
    if isinstance(b, SpectralField):
        grid = b.grid
        up = b.padded(2)
        samples, factor = np.abs(up) ** 2, 2
    else:
        if grid is None:
            raise ValueError("physical samples need a grid")
        samples = np.asarray(b)
        if np.iscomplexobj(samples):
            if np.max(np.abs(samples.imag)) > 1e-12 * max(1.0, np.max(np.abs(samples))):
                raise ValueError("Toeplitz symbol must be real")
            samples = samples.real
        factor = samples.size // grid.N
        if factor * grid.N != samples.size:
            raise ValueError("samples do not match the grid")
    if size is None:
        size = default_field_size(grid)
    n = factor * grid.N
    if size > n // 2:
        raise UnderResolvedError(f"size {size} exceeds the resolved band of the symbol")
    spec = np.fft.fft(samples) / n
    k = np.arange(-(size - 1), size)
    # coefficient of exp(i xi_k x) with the x_0 = -L/2 phase
    bk = spec[k % n] * np.where(k % 2 == 0, 1.0, -1.0)
    idx = np.arange(size)
    matrix = bk[(idx[:, None] - idx[None, :]) + size - 1]
    return ToeplitzOperator(float((size - 1) * grid.dxi), size, matrix, idx * grid.dxi, grid.dxi, "samples")


# spectra --------------------------------------------------------------------

def _lanczos_top(matrix: np.ndarray, k: int, vectors: bool = False):
    v0 = np.ones(min(matrix.shape), dtype=complex)
    out = spla.svds(matrix, k=k, v0=v0, tol=0, return_singular_vectors="u" if vectors else False)
    if not vectors:
        return np.sort(out)[::-1]
    u, s, _ = out
    order = np.argsort(s)[::-1]
    return u[:, order], s[order]


def takagi_values(H: HankelOperator, top: int | None = None) -> np.ndarray:
    """Singular values of the complex symmetric matrix, descending.

    ``top`` returns only the leading values, through Lanczos when that is cheaper.
    """
    if not np.all(np.isfinite(H.matrix)):
        raise FloatingPointError("Hankel matrix has non-finite entries")
    if top is not None and top < min(H.matrix.shape) // 4 and np.any(H.matrix):
        return _lanczos_top(H.matrix, top)
    vals = sla.svdvals(H.matrix)
    return vals if top is None else vals[:top]


def rank_estimate(H: HankelOperator, tau: float = RANK_TOL, values: np.ndarray | None = None) -> int:
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    if values is None:
        values = takagi_values(H, top=16)
        if values.size and values[-1] > tau * values[0]:
            values = takagi_values(H)
    if values.size == 0 or values[0] == 0:
        return 0
    return int(np.sum(values > tau * values[0]))


def gap_ratio(values: np.ndarray, rank: int) -> float:
    if rank >= values.size:
        return np.inf
    return float(values[rank - 1] / max(values[rank], np.finfo(float).tiny))


def _top_left_vectors(matrix: np.ndarray, k: int) -> np.ndarray:
    if k < min(matrix.shape) // 4 and np.any(matrix):
        return _lanczos_top(matrix, k, vectors=True)[0]
    u, _, _ = sla.svd(matrix, full_matrices=False)
    return u[:, :k]


def range_residual(vec: np.ndarray, basis: np.ndarray) -> float:
    """Relative norm of the part of vec outside the span of orthonormal columns."""
    nv = np.linalg.norm(vec)
    if nv == 0:
        return 0.0
    return float(np.linalg.norm(vec - basis @ (basis.conj().T @ vec)) / nv)


@dataclass
class KroneckerReport:
    rank: int
    degree: int
    basis_residuals: dict[str, float]
    symbol_residual: float
    complement_overlap: float
    tol: float = 1e-6

    @property
    def passed(self) -> bool:
        return (
            self.rank == self.degree
            and max(self.basis_residuals.values(), default=0.0) <= self.tol
            and self.symbol_residual <= self.tol
        )


def kronecker_range_check(sym: RationalSymbol, H: HankelOperator, tol: float = 1e-6,
                          rank: int | None = None) -> KroneckerReport:
    """Check that 1/(z-p_j)^m (m <= m_j) and u itself lie in the top-N singular span."""
    degree = sym.degree
    if rank is None:
        rank = rank_estimate(H)
    left = _top_left_vectors(H.matrix, max(degree, 1))
    residuals = {}
    basis_vecs = []
    for p, cs in zip(sym.poles, sym.coeffs):
        for m in range(1, len(cs) + 1):
            v = H.vector(RationalSymbol.from_terms([(p, m, 1.0)]))
            basis_vecs.append(v)
            residuals[f"1/(z-({p:.6g}))^{m}"] = range_residual(v, left)
    sym_res = range_residual(H.vector(sym), left)
    overlap = 0.0
    if basis_vecs and degree < H.size:
        full_u, _, _ = sla.svd(H.matrix, full_matrices=True) if H.size <= 512 else (None, None, None)
        if full_u is not None:
            rest = full_u[:, degree:]
            for v in basis_vecs:
                overlap = max(overlap, float(np.linalg.norm(rest.conj().T @ v) / np.linalg.norm(v)))
        else:
            # orthogonal complement of the top span, tested through projections
            for v in basis_vecs:
                overlap = max(overlap, range_residual(v, left))
    return KroneckerReport(rank, degree, residuals, sym_res, overlap, tol)


# Hilbert-Schmidt ------------------------------------------------------------

def hs_norm(H: HankelOperator) -> float:
    return float(np.linalg.norm(H.matrix))


def _hdot_half(u) -> float:
    if isinstance(u, RationalSymbol):
        return u.hdot_half_norm()
    from .functionals import conserved_quantities

    return float(np.sqrt(conserved_quantities(u, "line").M))


def hs_identity_residual(u, H: HankelOperator, eps: float = 1e-300) -> float:
    hs = hs_norm(H)
    target = _hdot_half(u) / np.sqrt(2 * np.pi)
    if hs == 0 and target == 0:
        return 0.0
    return abs(hs - target) / max(hs, eps)


# operator identities ------------------------------------------------------

def _op_norm(a: np.ndarray) -> float:
    """Largest singular value; Lanczos for big matrices."""
    if a.size == 0 or not np.any(a):
        return 0.0
    if min(a.shape) <= 256:
        return float(sla.norm(a, 2))
    v0 = np.ones(min(a.shape))
    return float(spla.svds(a, k=1, v0=v0, return_singular_vectors=False, tol=1e-12)[0])


def _field_band_check(u: SpectralField, size: int):
    tail = np.abs(u.coeffs[size:])
    if tail.size and np.max(tail) > 1e-10 * max(np.max(np.abs(u.coeffs)), 1e-300):
        raise UnderResolvedError("field is not band-limited to half the Hankel band")


def lax_identity_residual(u: SpectralField, size: int | None = None) -> float:
    """|| H_{Pi(|u|^2 u)} - (T H + H T - H^3) || / || H_{Pi(|u|^2 u)} || in operator norm."""
    from .dynamics import _nonlinear

    if isinstance(u, RationalSymbol):
        raise TypeError("the Lax identity is checked on grid fields; synthesize the symbol first")
    size = default_field_size(u.grid) if size is None else size
    _field_band_check(u, size)
    H = build_hankel(u, size=size)
    T = build_toeplitz(u, like=H)
    v = SpectralField(u.grid, _nonlinear(u.coeffs, u.grid)[0])
    Hv = build_hankel(v, size=size)
    M, Tm = H.matrix, T.matrix
    rhs = Tm @ M + M @ np.conj(Tm) - M @ np.conj(M) @ M
    lhs_norm = _op_norm(Hv.matrix)
    if lhs_norm == 0:
        return _op_norm(rhs)
    return _op_norm(Hv.matrix - rhs) / lhs_norm


def hankel_and_toeplitz(u, cutoff: float | None = None, size: int | None = None):
    """H_u and T_{|u|^2} on a shared node layout."""
    H = build_hankel(u, cutoff=cutoff, size=size)
    if isinstance(u, RationalSymbol):
        T = build_toeplitz(u.abs2(), cutoff=H.cutoff, size=H.size)
    else:
        T = build_toeplitz(u, like=H)
    return H, T


def traveling_wave_identity_residual(u, c: float, omega: float, cutoff: float | None = None,
                                     size: int | None = None, ops=None) -> float:
    """|| A H + H A + (omega/c) H + (1/c) H^3 || / || H ||,  A = D - T_{|u|^2}/c.

    ``ops`` may pass a prebuilt (H, T) pair from :func:`hankel_and_toeplitz`.
    """
    if c == 0:
        raise ValueError("velocity must be nonzero")
    H, T = ops if ops is not None else hankel_and_toeplitz(u, cutoff, size)
    M = H.matrix
    hn = _op_norm(M)
    if hn == 0:
        return 0.0
    A = np.diag(H.nodes).astype(complex) - T.matrix / c
    total = A @ M + M @ np.conj(A) + (omega / c) * M + (M @ np.conj(M) @ M) / c
    return _op_norm(total) / hn


def h2_eigen_residual(u, s: float, cutoff: float | None = None, size: int | None = None,
                      H: HankelOperator | None = None) -> float:
    """|| H^2 u - s^2 u || / || u || on the node vectors."""
    H = H if H is not None else build_hankel(u, cutoff=cutoff, size=size)
    v = H.vector(u)
    h2 = H.matrix @ np.conj(H.matrix @ np.conj(v))
    return float(np.linalg.norm(h2 - s**2 * v) / np.linalg.norm(v))


@dataclass
class AuSpectrum:
    eigenvalues: np.ndarray
    lowest_vector: np.ndarray
    nodes: np.ndarray
    n_negative: int
    overlap: float

    @property
    def lowest(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max_positive_gap(self) -> float:
        pos = np.sort(self.eigenvalues[self.eigenvalues >= 0])
        gaps = np.diff(np.concatenate([[0.0], pos]))
        return float(gaps.max()) if gaps.size else np.inf


def spectrum_Au(u, c: float, cutoff: float | None = None, size: int | None = None, ops=None) -> AuSpectrum:
    """Eigenvalues of D - T_{|u|^2}/c on the truncated band and overlap of the lowest mode with u."""
    if c == 0:
        raise ValueError("velocity must be nonzero")
    H, T = ops if ops is not None else hankel_and_toeplitz(u, cutoff, size)
    A = np.diag(H.nodes).astype(complex) - T.matrix / c
    vals, vecs = sla.eigh(A)
    v0 = vecs[:, 0]
    uv = H.vector(u)
    nu = np.linalg.norm(uv)
    overlap = float(abs(np.vdot(v0, uv)) / nu) if nu > 0 else 0.0
    return AuSpectrum(vals, v0, H.nodes, int(np.sum(vals < 0)), overlap)


def isospectral_drift(record, top_k: int, size: int | None = None, floor: float = 1e-10) -> float:
    """Max relative change of the leading Takagi values along a trajectory."""
    if record.singular_values and len(record.singular_values[0]) >= top_k:
        series = [np.asarray(s)[:top_k] for s in record.singular_values]
    else:
        series = [takagi_values(build_hankel(u, size=size), top=top_k) for u in record.snapshots]
    s0 = series[0]
    tracked = s0 > floor
    if not np.any(tracked):
        return 0.0
    return float(max(np.max(np.abs(s[tracked] - s0[tracked]) / s0[tracked]) for s in series))


def spectral_report(values: np.ndarray, **extra) -> str:
    vals = [float(v) for v in values]
    gaps = [vals[i] / vals[i + 1] if vals[i + 1] > 0 else None for i in range(len(vals) - 1)]
    return json.dumps({"values": vals, "gaps": gaps, **extra}, indent=2, sort_keys=True)
