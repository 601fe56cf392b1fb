"""Classical driven oscillator x'' + x = xi(t) with x(0) = x'(0) = 0.

The solution is written through the complex forcing integral

    F(t) = int_0^t exp(-i s) dxi(s)

(steps of xi enter as point masses), which gives

    (x_c - xi) - i v_c = -exp(i t) F(t).

F has closed forms for every profile kind, including piecewise-linear
tables, so x_c and v_c are exact to rounding at any time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, SystemParams
from .driving import DrivingProfile, Kind, evaluate

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _exp_integral(k, a, b):
    """int_a^b exp(i k s) ds, stable as k -> 0."""
    k = np.asarray(k, dtype=float)
    h = b - a
    return np.exp(0.5j * k * (a + b)) * h * np.sinc(k * h / (2 * np.pi))


def forcing_integral(profile: DrivingProfile, t):
    """F(t) = int_0^t exp(-i s) dxi(s) for scalar or array t."""
    t = np.asarray(t, dtype=float)
    xi_T, T, kind = profile.xi_T, profile.T, profile.kind
    if kind is Kind.STEP:
        return np.where(t > 0, xi_T + 0j, 0j)
    if kind is Kind.TWO_STEP:
        first = np.where(t > 0, 0.5 * xi_T + 0j, 0j)
        return first + np.where(t >= T, 0.5 * xi_T * np.exp(-1j * T), 0j)
    if kind is Kind.TABULATED:
        tab = profile.table
        out = np.zeros(t.shape, dtype=complex)
        for (a, xa), (b, xb) in zip(tab[:-1], tab[1:]):
            slope = (xb - xa) / (b - a)
            if slope == 0.0:
                continue
            upper = np.clip(t, a, b)
            out += slope * _exp_integral(-1.0, a, upper)
        return out
    tau = np.clip(t, 0.0, T)
    base = _exp_integral(-1.0, 0.0, tau)
    if kind is Kind.LINEAR_RAMP:
        return xi_T / T * base
    big_omega = 2 * np.pi / T
    cos_part = 0.5 * (_exp_integral(big_omega - 1.0, 0.0, tau)
                      + _exp_integral(-big_omega - 1.0, 0.0, tau))
    sign = -1.0 if kind is Kind.SINUSOIDAL_SMOOTH else 1.0
    return xi_T / T * (base + sign * cos_part)


def classical_state(profile: DrivingProfile, t):
    """Return ``(x_c, v_c)`` at time(s) t."""
    w = -np.exp(1j * np.asarray(t, dtype=float)) * forcing_integral(profile, t)
    x_c = evaluate(profile, t) + w.real
    v_c = -w.imag
    if np.ndim(t) == 0:
        return float(x_c), float(v_c)
    return x_c, v_c


def lagrangian(profile: DrivingProfile, t):
    """L = v_c^2/2 - (x_c^2 - xi^2)/2."""
    x_c, v_c = classical_state(profile, t)
    xi = evaluate(profile, t)
    return 0.5 * v_c**2 - 0.5 * (x_c**2 - np.asarray(xi) ** 2)


def _gauss_legendre(profile, a, b, n_sub):
    """Sum of n_sub-panel 16-point Gauss-Legendre rules over each [a_i, b_i]."""
    edges = a[:, None] + (b - a)[:, None] * np.linspace(0, 1, n_sub + 1)[None, :]
    lo, hi = edges[:, :-1], edges[:, 1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    nodes = mid[..., None] + half[..., None] * _GL_NODES
    vals = lagrangian(profile, nodes.ravel()).reshape(nodes.shape)
    return (half * (vals @ _GL_WEIGHTS)).sum(axis=1)


def integrate_lagrangian(profile: DrivingProfile, nodes, rtol=1e-12):
    """int L dt over consecutive intervals of the sorted ``nodes``.

    Intervals are split at the profile's breakpoints; each piece uses
    composite Gauss-Legendre, doubling the panel count until two successive
    refinements agree.
    """
    nodes = np.asarray(nodes, dtype=float)
    cuts = [b for b in profile.breakpoints() if nodes[0] < b < nodes[-1]]
    fine = np.union1d(nodes, cuts)
    a, b = fine[:-1], fine[1:]
    n_sub = max(1, int(math.ceil(np.max(b - a, initial=0.0) / 2.0)))
    coarse = _gauss_legendre(profile, a, b, n_sub)
    for _ in range(20):
        n_sub *= 2
        refined = _gauss_legendre(profile, a, b, n_sub)
        scale = 1.0 + np.abs(refined)
        if np.all(np.abs(refined - coarse) <= rtol * scale):
            break
        coarse = refined
    else:
        raise RuntimeError("action-phase quadrature did not converge")
    owner = np.searchsorted(nodes, a, side="right") - 1
    return np.bincount(owner, weights=refined, minlength=len(nodes) - 1)


@dataclass(frozen=True, eq=False)
class ClassicalTrajectory:
    times: np.ndarray
    x_c: np.ndarray
    v_c: np.ndarray
    phase: np.ndarray
    profile: DrivingProfile

    @property
    def xi(self):
        return evaluate(self.profile, self.times)

    def state(self, t):
        """``(x_c, v_c)`` at arbitrary t, not restricted to the sample grid."""
        return classical_state(self.profile, t)

    def phase_at(self, t):
        """Action phase Phi(t) = -int_0^t L, continuing from the nearest sample."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t_arr < 0):
            raise DomainError("phase is defined for t >= 0 only")
        idx = np.clip(np.searchsorted(self.times, t_arr, side="right") - 1, 0, None)
        out = self.phase[idx].copy()
        for j, (i, tj) in enumerate(zip(idx, t_arr)):
            if tj > self.times[i]:
                out[j] -= integrate_lagrangian(self.profile, [self.times[i], tj])[0]
        return float(out[0]) if np.ndim(t) == 0 else out

    def energy_functional(self):
        """(v_c^2 + (x_c - xi)^2) / 2 on the sample grid."""
        return 0.5 * (self.v_c**2 + (self.x_c - self.xi) ** 2)

    def to_rows(self):
        return np.column_stack([self.times, self.xi, self.x_c, self.v_c, self.phase])


def solve_trajectory(profile: DrivingProfile, params: SystemParams, t_end, n_samples=1001):
    """Sample x_c, v_c and the action phase on a uniform grid over [0, t_end]."""
    if not t_end > 0:
        raise DomainError(f"t_end must be positive, got {t_end!r}")
    if int(n_samples) < 2:
        raise DomainError(f"n_samples must be >= 2, got {n_samples!r}")
    return trajectory_on(profile, np.linspace(0.0, float(t_end), int(n_samples)))


def trajectory_on(profile: DrivingProfile, times):
    """Trajectory on an arbitrary strictly increasing grid starting at 0."""
    times = np.asarray(times, dtype=float)
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise DomainError("times must start at 0 and increase strictly")
    x_c, v_c = classical_state(profile, times)
    increments = integrate_lagrangian(profile, times) if len(times) > 1 else np.array([])
    phase = -np.concatenate([[0.0], np.cumsum(increments)])
    for arr in (times, x_c, v_c, phase):
        arr.setflags(write=False)
    return ClassicalTrajectory(times, x_c, v_c, phase, profile)


@dataclass(frozen=True)
class ResidualAmplitude:
    a: float
    relative: float


def residual_amplitude(traj: ClassicalTrajectory, T) -> ResidualAmplitude:
    """Radius of the phase-space circle left after the dot stops at T."""
    if not traj.times[0] <= T <= traj.times[-1]:
        raise DomainError(f"T={T!r} is outside the trajectory range "
                          f"[{traj.times[0]}, {traj.times[-1]}]")
    x_c, v_c = traj.state(float(T))
    # measured from the final position so a step at T = 0 counts as already taken
    a = math.hypot(x_c - traj.profile.xi_T, v_c)
    rel = a / abs(traj.profile.xi_T) if traj.profile.xi_T != 0 else math.inf
    return ResidualAmplitude(a, rel)


def residual_closed_form(kind, T, params: SystemParams, xi_T=None) -> ResidualAmplitude:
    """Closed-form residual amplitude of a named schedule stopping at T.

    For the linear ramp ``a_c = (lambda_so/2)(T0/T)|sin(pi T/T0)|`` and for the
    smooth sinusoid ``a_s = T0^2/|T^2 - T0^2| a_c``; both are written for the
    spin-flip displacement ``pi*lambda_so/2`` and scale linearly with
    ``xi_T``. The two-step and broken-sinusoid forms follow from the same
    forcing integral.
    """
    kind = Kind.parse(kind)
    if not T > 0:
        raise DomainError(f"T must be positive, got {T!r}")
    flip = math.pi * params.lambda_so / 2
    if xi_T is None:
        xi_T = flip
    r = T / params.T0
    if kind is Kind.TWO_STEP:
        a = abs(xi_T) * abs(math.cos(math.pi * r))
    else:
        a_c = abs(xi_T) / flip * params.lambda_so / 2 / r * abs(math.sin(math.pi * r))
        if kind is Kind.LINEAR_RAMP:
            a = a_c
        elif kind in (Kind.SINUSOIDAL_SMOOTH, Kind.SINUSOIDAL_BROKEN):
            if math.isclose(r, 1.0, rel_tol=1e-12):
                raise DomainError(
                    "closed form is singular at T = T0 (removable); "
                    "use solve_trajectory + residual_amplitude")
            if kind is Kind.SINUSOIDAL_SMOOTH:
                a = a_c / abs(r**2 - 1)
            else:
                a = a_c * abs(1 - 2 * r**2) / abs(1 - r**2)
        else:
            raise DomainError(f"no closed form for {kind.value}")
    rel = a / abs(xi_T) if xi_T else math.inf
    return ResidualAmplitude(a, rel)
