"""Physical parameters and the dimensionless frame.

Everything inside the package works in units with hbar = m* = omega = 1, so the
oscillator length sigma and the oscillator frequency are both 1 and the period
is T0 = 2*pi. Physical units only appear when parameters are read from a
config file or written next to results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

# hbar^2 / m_e in meV * nm^2
_HBAR2_OVER_ME = constants.hbar**2 / constants.m_e / (constants.e * 1e-3) * 1e18
_HBAR_MEV_PS = constants.hbar / (constants.e * 1e-3) * 1e12


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


@dataclass(frozen=True)
class SystemParams:
    """Spin-orbit coupled harmonic dot in the dimensionless frame.

    ``lambda_so`` is the spin-orbit length in units of sigma; pass ``math.inf``
    for a dot without spin-orbit coupling. ``beta_over_alpha`` fixes the ratio
    of Dresselhaus to Rashba coupling; the effective coupling is
    ``sqrt(alpha**2 + beta**2) = 1 / lambda_so``.
    """

    lambda_so: float
    beta_over_alpha: float = 0.0
    mass_ratio: float | None = None
    omega_meV: float | None = None
    effective_mass: float = field(default=1.0, init=False)
    omega: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not (self.lambda_so > 0):
            raise DomainError(f"lambda_so must be positive, got {self.lambda_so!r}")
        if not (self.beta_over_alpha >= 0) or math.isinf(self.beta_over_alpha):
            raise DomainError(
                f"beta_over_alpha must be finite and >= 0, got {self.beta_over_alpha!r}"
            )
        if self.mass_ratio is not None and not self.mass_ratio > 0:
            raise DomainError(f"mass_ratio must be positive, got {self.mass_ratio!r}")
        if self.omega_meV is not None and not self.omega_meV > 0:
            raise DomainError(f"omega_meV must be positive, got {self.omega_meV!r}")

    @classmethod
    def from_physical(cls, mass_ratio, omega_meV, lambda_so_nm, beta_over_alpha=0.0):
        """Build parameters from an effective mass ratio, level spacing and
        spin-orbit length. ``lambda_so_nm`` may be ``inf``."""
        for name, value in (
            ("mass_ratio", mass_ratio),
            ("omega_meV", omega_meV),
            ("lambda_so_nm", lambda_so_nm),
        ):
            if not value > 0:
                raise DomainError(f"{name} must be positive, got {value!r}")
        if not beta_over_alpha >= 0:
            raise DomainError(f"beta_over_alpha must be >= 0, got {beta_over_alpha!r}")
        sigma_nm = math.sqrt(_HBAR2_OVER_ME / (mass_ratio * omega_meV))
        return cls(
            lambda_so=lambda_so_nm / sigma_nm,
            beta_over_alpha=float(beta_over_alpha),
            mass_ratio=float(mass_ratio),
            omega_meV=float(omega_meV),
        )

    @classmethod
    def from_mapping(cls, data):
        """Build from a config mapping.

        Accepts either the physical keys ``mass_ratio``, ``omega_meV``,
        ``lambda_so_nm`` (and optional ``beta_over_alpha``) or a dimensionless
        ``lambda_so_over_sigma``.
        """
        data = dict(data)
        beta = float(data.pop("beta_over_alpha", 0.0))
        if "lambda_so_over_sigma" in data:
            value = data.pop("lambda_so_over_sigma")
            if data:
                raise DomainError(f"unexpected params keys: {sorted(data)}")
            return cls(lambda_so=_as_float("lambda_so_over_sigma", value), beta_over_alpha=beta)
        required = ("mass_ratio", "omega_meV", "lambda_so_nm")
        missing = [k for k in required if k not in data]
        if missing:
            raise DomainError(f"missing params keys: {missing}")
        extra = sorted(set(data) - set(required))
        if extra:
            raise DomainError(f"unexpected params keys: {extra}")
        return cls.from_physical(
            *(_as_float(k, data[k]) for k in required), beta_over_alpha=beta
        )

    # derived scales, all in the dimensionless frame

    @property
    def sigma(self) -> float:
        return 1.0 / math.sqrt(self.effective_mass * self.omega)

    @property
    def T0(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def coupling(self) -> float:
        """sqrt(alpha^2 + beta^2)."""
        return 1.0 / (self.effective_mass * self.lambda_so)

    @property
    def alpha(self) -> float:
        return self.coupling / math.sqrt(1.0 + self.beta_over_alpha**2)

    @property
    def beta(self) -> float:
        return self.alpha * self.beta_over_alpha

    @property
    def E_so(self) -> float:
        return -0.5 * self.effective_mass * self.coupling**2

    @property
    def has_spin_orbit(self) -> bool:
        return math.isfinite(self.lambda_so)

    @property
    def so_axis(self) -> np.ndarray:
        """Unit vector n with alpha*sigma_y - beta*sigma_x = coupling * n.sigma."""
        if not self.has_spin_orbit:
            return np.array([0.0, 1.0, 0.0])
        c = math.sqrt(1.0 + self.beta_over_alpha**2)
        return np.array([-self.beta_over_alpha / c, 1.0 / c, 0.0])

    @property
    def precession_axis(self) -> np.ndarray:
        """Direction the spin tilts into when rotated away from +z about ``so_axis``."""
        n = self.so_axis
        return np.array([n[1], -n[0], 0.0])

    # unit conversion

    @property
    def sigma_nm(self) -> float | None:
        if self.mass_ratio is None:
            return None
        return math.sqrt(_HBAR2_OVER_ME / (self.mass_ratio * self.omega_meV))

    @property
    def time_unit_ps(self) -> float | None:
        """Physical duration of one dimensionless time unit (1/omega)."""
        if self.omega_meV is None:
            return None
        return _HBAR_MEV_PS / self.omega_meV

    def to_physical(self):
        """Return ``(mass_ratio, omega_meV, lambda_so_nm, beta_over_alpha)``."""
        if self.mass_ratio is None:
            raise DomainError("parameters were not built from physical units")
        return (self.mass_ratio, self.omega_meV, self.lambda_so * self.sigma_nm,
                self.beta_over_alpha)


def _as_float(name, value):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a number, got {value!r}") from None


def sigma_from_display_convention(params: SystemParams, xi_T: float) -> float:
    """Oscillator length fixed at one tenth of the total dot displacement.

    This is the convention the reference figures use; it is independent of
    ``params`` apart from the length unit.
    """
    if not xi_T > 0:
        raise DomainError(f"xi_T must be positive, got {xi_T!r}")
    return 0.1 * xi_T


def display_params() -> SystemParams:
    """Parameters of the figure scenarios: sigma = 0.1 * (pi/2) * lambda_so."""
    return SystemParams(lambda_so=20.0 / math.pi)
