"""Exact observables of the driven spin-orbit dot, built from the classical trajectory.

The initial state is the pseudo-spin-up Kramers ground state
exp(-i x/lambda_so sigma_n) psi_0(x) chi_up, with sigma_n the spin-orbit axis.
At time t the state is the same orbital Gaussian centred on x_c(t), carrying
momentum v_c(t) and the position-dependent spin rotation, times the phase
exp(-i (E_so + 1/2) t + i Phi(t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .classical import ClassicalTrajectory
from .core import DomainError, SystemParams
from .driving import DrivingProfile, evaluate
from .hermite import hermite_functions

UP, DOWN = 0, 1


@dataclass(frozen=True)
class SpinExpectation:
    sx: np.ndarray | float
    sy: np.ndarray | float
    sz: np.ndarray | float


@dataclass(frozen=True)
class PseudoSpinExpectation:
    tx: np.ndarray | float
    ty: np.ndarray | float
    tz: np.ndarray | float
    doublet_restricted: bool = False


@dataclass(frozen=True)
class OccupationSpectrum:
    n_max: int
    p: np.ndarray
    c: np.ndarray  # shape (n_max + 1, 2): c[n, s]
    displacement_d: complex
    mean_nu: float

    def to_rows(self):
        return np.column_stack([np.arange(self.n_max + 1), self.p])


@dataclass(frozen=True)
class SpinorWavefunction:
    x: np.ndarray
    up: np.ndarray
    down: np.ndarray
    t: float

    def norm(self):
        density = np.abs(self.up) ** 2 + np.abs(self.down) ** 2
        return float(np.trapezoid(density, self.x))

    def density(self):
        return np.abs(self.up) ** 2 + np.abs(self.down) ** 2


def rotate_spinor(params: SystemParams, angle, up, down):
    """Apply exp(-i angle sigma_n) pointwise; ``angle`` broadcasts against the spinor."""
    nx, ny, _ = params.so_axis
    c, s = np.cos(angle), np.sin(angle)
    new_up = c * up - 1j * s * (nx - 1j * ny) * down
    new_down = c * down - 1j * s * (nx + 1j * ny) * up
    return new_up, new_down


def _spin_angle(params, x):
    if not params.has_spin_orbit:
        return np.zeros_like(np.asarray(x, dtype=float))
    return np.asarray(x, dtype=float) / params.lambda_so


def spin_attenuation(params: SystemParams) -> float:
    """Spin contrast left after averaging the rotation over the ground-state Gaussian."""
    if not params.has_spin_orbit:
        return 1.0
    return math.exp(-params.sigma**2 / params.lambda_so**2)


def _bloch_vector(params, angle, scale):
    """``scale/2`` times the unit vector rotated from +z by ``angle`` about the SO axis."""
    axis = params.precession_axis
    s, c = np.sin(angle), np.cos(angle)
    return 0.5 * scale * s * axis[0], 0.5 * scale * s * axis[1], 0.5 * scale * c


def spin_expectation(traj: ClassicalTrajectory, params: SystemParams, t) -> SpinExpectation:
    """Mean spin: precession by 2 x_c / lambda_so, attenuated by the orbital spread."""
    if not params.has_spin_orbit:
        shape = np.shape(t)
        return SpinExpectation(np.zeros(shape), np.zeros(shape), np.full(shape, 0.5))
    x_c, _ = traj.state(t)
    sx, sy, sz = _bloch_vector(params, 2 * x_c / params.lambda_so, spin_attenuation(params))
    return SpinExpectation(sx, sy, sz)


def pseudo_spin(profile: DrivingProfile, params: SystemParams, t) -> PseudoSpinExpectation:
    xi = evaluate(profile, t)
    tx, ty, tz = _bloch_vector(params, 2 * _spin_angle(params, xi), 1.0)
    return PseudoSpinExpectation(tx, ty, tz, doublet_restricted=False)


def ground_probability(traj: ClassicalTrajectory, t):
    """P_0 = exp(-[(x_c - xi)^2 + v_c^2] / 2)."""
    x_c, v_c = traj.state(t)
    delta = x_c - evaluate(traj.profile, t)
    return np.exp(-0.5 * (delta**2 + v_c**2))


def pseudo_spin_ground(profile: DrivingProfile, traj: ClassicalTrajectory,
                       params: SystemParams, t) -> PseudoSpinExpectation:
    full = pseudo_spin(profile, params, t)
    p0 = ground_probability(traj, t)
    return PseudoSpinExpectation(full.tx * p0, full.ty * p0, full.tz * p0,
                                 doublet_restricted=True)


def displacement(traj: ClassicalTrajectory, t):
    """Complex displacement d = (x_c - xi) - i v_c of the packet from the dot minimum."""
    x_c, v_c = traj.state(t)
    return (x_c - evaluate(traj.profile, t)) - 1j * v_c


def default_n_max(mean_nu):
    """Truncation that leaves a Poisson tail below ~1e-10."""
    return int(math.ceil(mean_nu + 10 * math.sqrt(mean_nu) + 10))


def _global_phase(traj, params, t):
    return np.exp(-1j * (params.E_so + 0.5) * t + 1j * traj.phase_at(t))


def _spinor_factor(params, xi):
    """chi_s^dagger exp(-i xi/lambda_so sigma_n) chi_up for s = up, down."""
    up, down = rotate_spinor(params, _spin_angle(params, xi), 1.0 + 0j, 0.0 + 0j)
    return np.array([up, down])


def orbital_overlaps(delta, v, xi, n_max):
    """I_n = <psi_n(x - xi)| exp(i v x) psi_0(x - xi - delta)>, n = 0..n_max."""
    z = (delta + 1j * v) / math.sqrt(2)
    n = np.arange(n_max + 1)
    prefactor = np.exp(1j * v * (xi + 0.5 * delta) - 0.5 * abs(z) ** 2)
    if z == 0:
        return np.where(n == 0, prefactor, 0j)
    log_mag = n * math.log(abs(z)) - 0.5 * gammaln(n + 1)
    return prefactor * np.exp(log_mag + 1j * n * np.angle(z))


def occupations(traj: ClassicalTrajectory, profile: DrivingProfile, params: SystemParams,
                t: float, n_max: int | None = None) -> OccupationSpectrum:
    """Coefficients in the instantaneous Kramers basis and manifold probabilities."""
    t = float(t)
    x_c, v_c = traj.state(t)
    xi = evaluate(profile, t)
    d = complex(x_c - xi, -v_c)
    nu = 0.5 * abs(d) ** 2
    if n_max is None:
        n_max = default_n_max(nu)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    overlaps = orbital_overlaps(x_c - xi, v_c, xi, n_max)
    c = _global_phase(traj, params, t) * overlaps[:, None] * _spinor_factor(params, xi)[None, :]
    p = np.abs(overlaps) ** 2
    return OccupationSpectrum(int(n_max), p, c, d, nu)


def energy(traj: ClassicalTrajectory, profile: DrivingProfile, params: SystemParams, t, n=0):
    """<H(t)> = E_so + (n + 1/2) + v_c^2/2 + (x_c - xi)^2/2."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    x_c, v_c = traj.state(t)
    delta = x_c - evaluate(profile, t)
    return params.E_so + n + 0.5 + 0.5 * v_c**2 + 0.5 * delta**2


def wavefunction(traj: ClassicalTrajectory, profile: DrivingProfile, params: SystemParams,
                 x_grid, t, n=0, s=UP) -> SpinorWavefunction:
    """Exact state grown from the n-th Kramers state with pseudo-spin s."""
    x = np.asarray(x_grid, dtype=float)
    t = float(t)
    x_c, v_c = traj.state(t)
    orbital = hermite_functions(n, x - x_c)[n]
    phase = np.exp(1j * (-(params.E_so + n + 0.5) * t + traj.phase_at(t) + v_c * x))
    base = phase * orbital
    chi = (base, np.zeros_like(base)) if s == UP else (np.zeros_like(base), base)
    up, down = rotate_spinor(params, _spin_angle(params, x), *chi)
    psi = SpinorWavefunction(x, up, down, t)
    deficit = 1.0 - psi.norm()
    if deficit > 1e-8:
        raise DomainError(f"x grid does not cover the wavefunction (norm deficit {deficit:.3g})")
    return psi
