"""Brute-force spinor Schroedinger solver on a periodic grid.

Strang splitting: half a step of kinetic + spin-orbit energy in momentum
space, a full step of the trap potential at the midpoint time, another half
step in momentum space. For every wavenumber k the momentum-space generator
k^2/2 + k (alpha sigma_y - beta sigma_x) is a 2x2 matrix whose exponential is
written down exactly, so the spin-orbit term adds no splitting error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import fft as sp_fft

from .core import DomainError, SystemParams
from .driving import DrivingProfile, evaluate
from .hermite import hermite_functions
from .observables import (DOWN, UP, OccupationSpectrum, PseudoSpinExpectation,
                          SpinExpectation, SpinorWavefunction, rotate_spinor)


DEFAULT_POINTS = 2048
DEFAULT_DT_OVER_T0 = 1e-4


class ConvergenceError(RuntimeError):
    """The grid or time step cannot deliver the requested accuracy."""


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n_points: int = DEFAULT_POINTS
    dt: float = 2 * math.pi * DEFAULT_DT_OVER_T0

    def __post_init__(self):
        n = int(self.n_points)
        if n < 256 or n & (n - 1):
            raise DomainError(f"n_points must be a power of two >= 256, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise DomainError("x_max must exceed x_min")
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self):
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


def default_grid(profile: DrivingProfile, params: SystemParams, t_end,
                 n_points=DEFAULT_POINTS, dt_over_T0=DEFAULT_DT_OVER_T0, margin=10.0) -> GridSpec:
    """Box holding the packet and the dot over [0, t_end] with ``margin`` sigma to spare.

    The box is never narrower than 2 (|xi_T| + margin).
    """
    from .classical import classical_state

    t = np.linspace(0.0, max(float(t_end), profile.T), 4001)
    x_c, _ = classical_state(profile, t)
    xi = evaluate(profile, t)
    lo = min(x_c.min(), xi.min()) - margin
    hi = max(x_c.max(), xi.max()) + margin
    width = max(hi - lo, 2 * (abs(profile.xi_T) + margin))
    centre = 0.5 * (lo + hi)
    return GridSpec(centre - width / 2, centre + width / 2, int(n_points),
                    dt_over_T0 * params.T0)


@dataclass(frozen=True, eq=False)
class SpinorField:
    grid: GridSpec
    up: np.ndarray
    down: np.ndarray
    t: float = 0.0

    def norm(self):
        return float((np.sum(np.abs(self.up) ** 2) + np.sum(np.abs(self.down) ** 2))
                     * self.grid.dx)

    def overlap(self, other):
        """<other|self>; ``other`` is a SpinorField or SpinorWavefunction on the same x."""
        return complex((np.vdot(other.up, self.up) + np.vdot(other.down, self.down))
                       * self.grid.dx)

    def to_rows(self):
        return np.column_stack([self.grid.x, self.up.real, self.up.imag,
                                self.down.real, self.down.imag])


def initial_kramers_state(params: SystemParams, grid: GridSpec, n=0, s=UP,
                          xi0=0.0) -> SpinorField:
    """Instantaneous eigenstate exp(-i (x - xi0)/lambda_so sigma_n) psi_n(x - xi0) chi_s."""
    points_per_sigma = params.sigma / grid.dx
    x = grid.x
    orbital = hermite_functions(n, x - xi0)[n].astype(complex)
    chi = (orbital, np.zeros_like(orbital)) if s == UP else (np.zeros_like(orbital), orbital)
    angle = (x - xi0) / params.lambda_so if params.has_spin_orbit else np.zeros_like(x)
    up, down = rotate_spinor(params, angle, *chi)
    field = SpinorField(grid, up, down, 0.0)
    deficit = 1.0 - field.norm()
    if points_per_sigma < 16 or abs(deficit) > 1e-8:
        raise DomainError(
            f"grid under-resolves the initial state ({points_per_sigma:.1f} points per sigma, "
            f"norm deficit {deficit:.3g})")
    scale = 1.0 / math.sqrt(field.norm())
    return replace(field, up=up * scale, down=down * scale)


class _Propagator:
    """Per-run workspace: momentum-space matrices cached by step length."""

    def __init__(self, grid: GridSpec, params: SystemParams):
        self.grid = grid
        self.params = params
        self.k = grid.k
        self.x = grid.x
        nx, ny, _ = params.so_axis
        self.off_ud = nx - 1j * ny  # sigma_n[0, 1]
        self.off_du = nx + 1j * ny  # sigma_n[1, 0]
        self.coupling = params.coupling if params.has_spin_orbit else 0.0
        self._cache = {}

    def kinetic(self, tau):
        """exp(-i tau (k^2/2 + coupling k sigma_n)) as (diag, off_ud, off_du) arrays."""
        if tau not in self._cache:
            k = self.k
            free = np.exp(-0.5j * k**2 * tau)
            angle = self.coupling * k * tau
            diag = free * np.cos(angle)
            s = -1j * free * np.sin(angle)
            self._cache[tau] = (diag, s * self.off_ud, s * self.off_du)
        return self._cache[tau]

    def apply_kinetic(self, spec, tau):
        diag, ud, du = self.kinetic(tau)
        up, down = spec
        return np.stack([diag * up + ud * down, du * up + diag * down])

    def run_segment(self, psi, profile, t0, t1):
        """Advance ``psi`` (shape (2, N)) from t0 to t1 with equal steps <= grid.dt."""
        n_steps = max(1, int(math.ceil((t1 - t0) / self.grid.dt - 1e-9)))
        dt = (t1 - t0) / n_steps
        xis = evaluate(profile, t0 + dt * (np.arange(n_steps) + 0.5))
        x = self.x
        spec = self.apply_kinetic(sp_fft.fft(psi, axis=-1), 0.5 * dt)
        for j in range(n_steps):
            psi = sp_fft.ifft(spec, axis=-1)
            psi *= np.exp(-0.5j * dt * (x - xis[j]) ** 2)
            spec = self.apply_kinetic(sp_fft.fft(psi, axis=-1),
                                      dt if j < n_steps - 1 else 0.5 * dt)
        return sp_fft.ifft(spec, axis=-1)


def _segments(profile, t0, t1):
    cuts = [b for b in profile.breakpoints() if t0 < b < t1]
    edges = [t0, *cuts, t1]
    return list(zip(edges[:-1], edges[1:]))


def evolve_samples(field: SpinorField, profile: DrivingProfile, params: SystemParams, times):
    """Yield the field at each of the increasing ``times`` (all >= field.t)."""
    grid = field.grid
    if grid.dt > params.T0 / 500 * (1 + 1e-12):
        raise ConvergenceError(
            f"time step {grid.dt / params.T0:.3g} T0 exceeds T0/500; use a smaller dt")
    prop = _Propagator(grid, params)
    psi = np.stack([field.up, field.down])
    t = field.t
    norm0 = field.norm()
    for target in times:
        target = float(target)
        if target < t - 1e-12:
            raise DomainError("sample times must be increasing and not before field.t")
        for a, b in _segments(profile, t, target):
            psi = prop.run_segment(psi, profile, a, b)
        t = max(t, target)
        out = SpinorField(grid, psi[0], psi[1], t)
        drift = abs(out.norm() - norm0)
        if drift > 1e-8:
            raise ConvergenceError(f"norm drifted by {drift:.3g}; use a smaller dt")
        edge = _edge_weight(out)
        if edge > 1e-10:
            raise ConvergenceError(
                f"wavefunction reaches the box edge (weight {edge:.3g}); enlarge the grid")
        yield out


def _edge_weight(field):
    n = field.grid.n_points // 32
    dens = np.abs(field.up) ** 2 + np.abs(field.down) ** 2
    return float((dens[:n].sum() + dens[-n:].sum()) * field.grid.dx)


def evolve(field: SpinorField, profile: DrivingProfile, params: SystemParams,
           t_end) -> SpinorField:
    out = field
    for out in evolve_samples(field, profile, params, [t_end]):
        pass
    return out


# measurements


def measure_spin(field: SpinorField) -> SpinExpectation:
    dx = field.grid.dx
    cross = np.vdot(field.up, field.down) * dx
    sz = 0.5 * (np.sum(np.abs(field.up) ** 2) - np.sum(np.abs(field.down) ** 2)) * dx
    return SpinExpectation(float(cross.real), float(cross.imag), float(sz))


def measure_energy(field: SpinorField, profile: DrivingProfile, params: SystemParams, t):
    grid = field.grid
    prop = _Propagator(grid, params)
    k = prop.k
    up_k = np.fft.fft(field.up)
    down_k = np.fft.fft(field.down)
    kin = 0.5 * k**2 * (np.abs(up_k) ** 2 + np.abs(down_k) ** 2)
    soi = prop.coupling * k * 2 * np.real(np.conj(up_k) * prop.off_ud * down_k)
    kinetic = np.sum(kin + soi) * grid.dx / grid.n_points
    xi = evaluate(profile, t)
    dens = np.abs(field.up) ** 2 + np.abs(field.down) ** 2
    potential = np.sum(0.5 * (grid.x - xi) ** 2 * dens) * grid.dx
    return float(kinetic + potential)


def _check_resolvable(grid, params, xi, n_max):
    reach = math.sqrt(2 * n_max + 1) + 6.0
    k_max = math.pi / grid.dx
    if xi - reach < grid.x_min or xi + reach > grid.x_max or reach > k_max:
        raise DomainError(
            f"n_max={n_max} is not resolvable on the grid: eigenfunctions need "
            f"[{xi - reach:.3g}, {xi + reach:.3g}] and |k| < {reach:.3g}")


def project_instantaneous(field: SpinorField, profile: DrivingProfile, params: SystemParams,
                          t, n_max) -> OccupationSpectrum:
    """Coefficients <Psi~_ns(t)|field> in the Kramers basis of the frozen trap at time t."""
    grid = field.grid
    xi = evaluate(profile, t)
    _check_resolvable(grid, params, xi, n_max)
    x = grid.x
    angle = -(x - xi) / params.lambda_so if params.has_spin_orbit else np.zeros_like(x)
    up, down = rotate_spinor(params, angle, field.up, field.down)
    basis = hermite_functions(n_max, x - xi)
    c = np.stack([basis @ up, basis @ down], axis=1) * grid.dx
    p = np.sum(np.abs(c) ** 2, axis=1)
    # centroid of the un-rotated packet relative to the dot, in phase space
    dens = np.abs(up) ** 2 + np.abs(down) ** 2
    norm = dens.sum()
    mean_x = float(np.sum(x * dens) / norm)
    k = grid.k
    spec = np.abs(np.fft.fft(up)) ** 2 + np.abs(np.fft.fft(down)) ** 2
    mean_k = float(np.sum(k * spec) / spec.sum())
    d = complex(mean_x - xi, -mean_k)
    return OccupationSpectrum(int(n_max), p, c, d, float(np.sum(np.arange(n_max + 1) * p)))


def measure_pseudo_spin(field: SpinorField, profile: DrivingProfile, params: SystemParams,
                        t, n_max) -> PseudoSpinExpectation:
    """Pseudo-spin from projections onto manifolds 0..n_max (n_max = 0: ground doublet)."""
    spec = project_instantaneous(field, profile, params, t, n_max)
    up, down = spec.c[:, UP], spec.c[:, DOWN]
    cross = np.vdot(up, down)
    tz = 0.5 * float(np.sum(np.abs(up) ** 2) - np.sum(np.abs(down) ** 2))
    return PseudoSpinExpectation(float(cross.real), float(cross.imag), tz,
                                 doublet_restricted=(n_max == 0))


def on_grid(psi: SpinorWavefunction, grid: GridSpec):
    """View an analytic wavefunction sampled on ``grid.x`` as a SpinorField."""
    return SpinorField(grid, psi.up, psi.down, psi.t)


def l2_distance(field: SpinorField, other):
    diff = (np.sum(np.abs(field.up - other.up) ** 2)
            + np.sum(np.abs(field.down - other.down) ** 2))
    return float(math.sqrt(diff * field.grid.dx))


def infidelity(field: SpinorField, other):
    return 1.0 - abs(field.overlap(other)) ** 2
