"""Time integration of i u_t = Pi(|u|^2 u) on the periodic window."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .functionals import norm
from .hardy import FrequencyGrid, GridMismatchError, SpectralField, read_field, synth_rational
from .manifest import ConfigError
from .rational import RationalSymbol
from .solitons import SolitonParams, circle_soliton_field

log = logging.getLogger(__name__)

STABILITY_GUARD = 0.2
BLOWUP_THRESHOLD = 1e6



class NumericalFailure(RuntimeError):
    pass


@dataclass
class SimulationConfig:
    L: float = 256.0
    N: int = 4096
    dt: float = 1e-3
    T: float = 1.0
    stride: int = 100
    log_stride: int = 1
    initial: dict = field(default_factory=lambda: {"kind": "soliton", "C": 1.0, "p": [0.0, -1.0]})
    hankel_top_k: int = 0
    hankel_size: int | None = None
    cylinder: dict | None = None
    reference: bool = False
    guard: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not self.T >= self.dt:
            raise ConfigError(f"T={self.T} must be at least dt={self.dt}")
        if self.stride < 1 or self.log_stride < 1:
            raise ConfigError("stride and log_stride must be >= 1")
        if self.hankel_top_k < 0:
            raise ConfigError("hankel_top_k must be >= 0")
        if self.cylinder is not None:
            keys = set(self.cylinder)
            if not {"a", "r"} <= keys <= {"a", "r", "measure"}:
                raise ConfigError(f"cylinder monitor takes 'a', 'r' and optionally 'measure', got {sorted(keys)}")

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(float(self.L), int(self.N))

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SimulationRecord:
    times: list[float] = field(default_factory=list)
    snapshots: list[SpectralField] = field(default_factory=list)
    log_t: list[float] = field(default_factory=list)
    log_Q: list[float] = field(default_factory=list)
    log_M: list[float] = field(default_factory=list)
    log_E: list[float] = field(default_factory=list)
    singular_values: list[np.ndarray] = field(default_factory=list)
    cylinder: list[tuple[float, float, float]] = field(default_factory=list)
    deviation: list[float] = field(default_factory=list)
    blowup: bool = False
    diagnostic: str = ""
    wall_time: float = 0.0

    def drift(self, name: str) -> float:
        v = np.asarray(getattr(self, f"log_{name}"))
        if v.size == 0:
            return 0.0
        ref = abs(v[0])
        return float(np.max(np.abs(v - v[0])) / ref) if ref > 0 else float(np.max(np.abs(v)))

    def summary(self) -> dict[str, Any]:
        out = {
            "drift_Q": self.drift("Q"),
            "drift_M": self.drift("M"),
            "drift_E": self.drift("E"),
            "final_time": self.times[-1] if self.times else 0.0,
            "snapshots": len(self.times),
            "blowup": self.blowup,
            "diagnostic": self.diagnostic,
        }
        if self.deviation:
            out["max_deviation_L2"] = float(max(self.deviation))
        if self.cylinder:
            out["max_cylinder_distance"] = float(max(d for d, _, _ in self.cylinder))
        return out


# initial data ---------------------------------------------------------------

def _cplx(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex numbers are [re, im] pairs, got {v}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def symbol_from_spec(spec: dict) -> RationalSymbol:
    kind = spec.get("kind")
    if kind == "soliton":
        return RationalSymbol.simple(_cplx(spec["C"]), _cplx(spec["p"]))
    if kind == "rational":
        poles = [_cplx(p) for p in spec["poles"]]
        coeffs = [[_cplx(c) for c in cs] for cs in spec["coeffs"]]
        return RationalSymbol.from_poles(poles, coeffs)
    raise ConfigError(f"not a rational descriptor: {kind!r}")


def random_band_limited(grid: FrequencyGrid, seed: int, modes: int = 64, amplitude: float = 0.5) -> SpectralField:
    """Random Hardy field on modes 1..modes with a smooth taper, sup-norm scaled to amplitude."""
    rng = np.random.default_rng(seed)
    k = np.arange(grid.n_modes)
    c = np.zeros(grid.n_modes, dtype=complex)
    band = (k >= 1) & (k <= modes)
    c[band] = (rng.normal(size=band.sum()) + 1j * rng.normal(size=band.sum())) * np.cos(
        0.5 * np.pi * k[band] / (modes + 1)
    ) ** 2
    u = SpectralField(grid, c)
    return u * (amplitude / np.max(np.abs(u.padded(2))))


def initial_field(spec: dict, grid: FrequencyGrid) -> tuple[SpectralField, tuple[float, float] | None]:
    """Initial field and, for exact traveling waves, the (c, omega) of its own motion on the grid."""
    kind = spec.get("kind")
    if kind == "zero":
        return SpectralField.zeros(grid), (0.0, 0.0)
    if kind == "soliton":
        params = SolitonParams(_cplx(spec["C"]), _cplx(spec["p"]))
        return synth_rational(params.symbol(), grid), (params.c, params.omega)
    if kind == "rational":
        return synth_rational(symbol_from_spec(spec), grid), None
    if kind == "soliton+perturbation":
        from .functionals import norm as _norm

        params = SolitonParams(_cplx(spec["C"]), _cplx(spec["p"]))
        g = synth_rational(symbol_from_spec(spec["perturbation"]), grid)
        g = g * (1.0 / _norm(g, "sobolev", 0.5, measure="line"))
        return synth_rational(params.symbol(), grid) + float(spec["delta"]) * g, None
    if kind == "circle":
        c, omega, u0 = make_circle_soliton(_cplx(spec["C"]), _cplx(spec["p_disk"]), grid)
        return u0, (c, omega)
    if kind == "random":
        return random_band_limited(grid, int(spec.get("seed", 0)), int(spec.get("modes", 64)),
                                   float(spec.get("amplitude", 0.5))), None
    if kind == "file":
        u = read_field(spec["path"])
        if u.grid != grid:
            raise GridMismatchError(f"file grid {u.grid} differs from configured {grid}")
        return u, None
    raise ConfigError(f"unknown initial-condition kind {kind!r}")


# the flow -------------------------------------------------------------------

def _nonlinear(a: np.ndarray, grid: FrequencyGrid) -> tuple[np.ndarray, np.ndarray]:
    """Pi(|u|^2 u) with zero padding by two (alias free for cubic Hardy products)."""
    up = grid.to_physical(a, 2)
    return grid.from_physical(np.abs(up) ** 2 * up), up


def rhs(u: SpectralField) -> SpectralField:
    """-i Pi(|u|^2 u)."""
    if not u.is_finite():
        raise NumericalFailure("non-finite amplitudes in rhs")
    n, _ = _nonlinear(u.coeffs, u.grid)
    return SpectralField(u.grid, -1j * n)


def _rk4(a: np.ndarray, dt: float, grid: FrequencyGrid):
    n1, up = _nonlinear(a, grid)
    k1 = -1j * n1
    k2 = -1j * _nonlinear(a + 0.5 * dt * k1, grid)[0]
    k3 = -1j * _nonlinear(a + 0.5 * dt * k2, grid)[0]
    k4 = -1j * _nonlinear(a + dt * k3, grid)[0]
    return a + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4), up


def step_rk4(u: SpectralField, dt: float) -> SpectralField:
    """One classical Runge-Kutta step; every stage stays on k >= 0."""
    a, _ = _rk4(u.coeffs, dt, u.grid)
    if not np.all(np.isfinite(a)):
        raise NumericalFailure("overflow during RK4 step")
    return SpectralField(u.grid, a)


def check_guard(u: SpectralField, dt: float) -> float:
    peak = float(np.max(np.abs(u.padded(2))) ** 2)
    if dt * peak > STABILITY_GUARD:
        raise NumericalFailure(
            f"blow-up guard: dt*max|u0|^2 = {dt * peak:.3g} exceeds {STABILITY_GUARD}"
        )
    return peak


def simulate(config: SimulationConfig, initial: SpectralField | None = None) -> SimulationRecord:
    grid = config.grid
    if initial is None:
        u0, speeds = initial_field(config.initial, grid)
    else:
        if initial.grid != grid:
            raise GridMismatchError(f"initial field on {initial.grid}, config grid {grid}")
        u0, speeds = initial, None
    if config.guard:
        check_guard(u0, config.dt)
    if config.reference and speeds is None:
        raise ConfigError("reference deviation needs a traveling-wave initial condition")

    cyl_spec = None
    if config.cylinder is not None:
        from .variational import CylinderSpec, cylinder_distance

        cyl_spec = CylinderSpec(float(config.cylinder["a"]), float(config.cylinder["r"]))
    if config.hankel_top_k:
        from .hankel import build_hankel, takagi_values

    rec = SimulationRecord()
    start = time.perf_counter()
    a = u0.coeffs.copy()
    dt = config.dt
    n_steps = config.n_steps
    L = grid.L
    xi = grid.xi

    def snapshot(step: int, a_now: np.ndarray):
        t = step * dt
        u = SpectralField(grid, a_now)
        rec.times.append(t)
        rec.snapshots.append(u)
        if config.hankel_top_k:
            H = build_hankel(u, size=config.hankel_size)
            rec.singular_values.append(takagi_values(H, top=config.hankel_top_k))
        if cyl_spec is not None:
            fit = cylinder_distance(u, cyl_spec, measure=config.cylinder.get("measure", "line"))
            rec.cylinder.append((fit.distance, fit.theta, fit.x0))
        if config.reference:
            ref = traveling_wave_reference(u0, t, *speeds)
            rec.deviation.append(deviation(u, ref))

    def record_log(step: int, a_now: np.ndarray, up: np.ndarray):
        a2 = np.abs(a_now) ** 2
        rec.log_t.append(step * dt)
        rec.log_Q.append(float(L * np.sum(a2)))
        rec.log_M.append(float(L * np.sum(xi * a2)))
        rec.log_E.append(float(L * np.mean(np.abs(up) ** 4)))

    for step in range(n_steps + 1):
        if step % config.stride == 0 or step == n_steps:
            snapshot(step, a)
        if step == n_steps:
            up = grid.to_physical(a, 2)
            if not rec.log_t or rec.log_t[-1] != step * dt:
                record_log(step, a, up)
            break
        a_next, up = _rk4(a, dt, grid)
        if step % config.log_stride == 0:
            record_log(step, a, up)
        peak = np.max(np.abs(up))
        if not np.isfinite(peak) or peak > BLOWUP_THRESHOLD or not np.all(np.isfinite(a_next)):
            rec.blowup = True
            rec.diagnostic = f"blow-up at t={step * dt:.6g}: max|u| = {peak:.3g}"
            log.warning(rec.diagnostic)
            break
        a = a_next
    rec.wall_time = time.perf_counter() - start
    return rec


# references and metrics ---------------------------------------------------

def traveling_wave_reference(u0, t: float, c: float | None = None, omega: float | None = None,
                             grid: FrequencyGrid | None = None) -> SpectralField:
    """exp(-i omega t) u0(x - c t) by phase twists of the coefficients.

    ``u0`` is a SpectralField (then c, omega are required) or SolitonParams
    (then its line values are used on ``grid``).
    """
    if isinstance(u0, SolitonParams):
        params = u0
        u0 = synth_rational(params.symbol(), grid or FrequencyGrid(256.0, 4096))
        c = params.c if c is None else c
        omega = params.omega if omega is None else omega
    if c is None or omega is None:
        raise ValueError("speed and phase rate are required for a field")
    twist = np.exp(-1j * omega * t - 1j * c * u0.grid.xi * t)
    return SpectralField(u0.grid, u0.coeffs * twist)


def deviation(u: SpectralField, reference: SpectralField, kind: str = "L2", s: float | None = None,
              measure: str = "torus") -> float:
    if u.grid != reference.grid:
        raise GridMismatchError(f"{u.grid} vs {reference.grid}")
    return norm(u - reference, kind, s, measure)


def make_circle_soliton(C: complex, p_disk: complex, grid: FrequencyGrid, N_wave: int = 1):
    """C/(exp(2 pi i x/L) - p_disk) with (c, omega) from the two lowest mode equations."""
    if N_wave != 1:
        raise ValueError("only N_wave = 1, l = 0 is supported")
    u0 = circle_soliton_field(C, p_disk, grid)
    n, _ = _nonlinear(u0.coeffs, grid)
    a0, a1 = u0.coeffs[0], u0.coeffs[1]
    # mode 0: omega a0 = n0 ; mode 1: (c kappa + omega) a1 = n1
    omega = n[0] / a0
    c = (n[1] / a1 - omega) / grid.dxi
    return float(c.real), float(omega.real), u0



def grid_traveling_wave_residual(u: SpectralField, c: float, omega: float) -> float:
    """|| c D u + omega u - Pi(|u|^2 u) || / || u || on the torus."""
    n, _ = _nonlinear(u.coeffs, u.grid)
    res = c * u.grid.xi * u.coeffs + omega * u.coeffs - n
    nu = np.linalg.norm(u.coeffs)
    return float(np.linalg.norm(res) / nu) if nu > 0 else 0.0
