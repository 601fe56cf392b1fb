"""Schedules xi(t) for the position of the potential minimum."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, SystemParams


class Kind(str, enum.Enum):
    TWO_STEP = "TwoStep"
    LINEAR_RAMP = "LinearRamp"
    SINUSOIDAL_BROKEN = "SinusoidalBroken"
    SINUSOIDAL_SMOOTH = "SinusoidalSmooth"
    STEP = "Step"
    TABULATED = "Tabulated"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).lower():
                return kind
        raise DomainError(f"unknown driving kind {value!r}; expected one of "
                          f"{[k.value for k in cls]}")


NAMED_KINDS = (Kind.TWO_STEP, Kind.LINEAR_RAMP, Kind.SINUSOIDAL_BROKEN,
               Kind.SINUSOIDAL_SMOOTH)


@dataclass(frozen=True, eq=False)
class DrivingProfile:
    """Position of the dot minimum; the dot starts at 0 and stops at ``xi_T`` at ``T``.

    ``TwoStep`` jumps by ``xi_T/2`` just after ``t = 0`` and again at ``t = T``.
    ``Step`` jumps by ``xi_T`` just after ``t = 0`` (``T`` is 0).
    ``Tabulated`` interpolates ``table`` (shape ``(m, 2)`` of ``(t, xi)`` rows) linearly.
    """

    kind: Kind
    xi_T: float
    T: float
    table: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        if not math.isfinite(self.xi_T):
            raise DomainError(f"xi_T must be finite, got {self.xi_T!r}")
        if self.kind is Kind.STEP:
            object.__setattr__(self, "T", 0.0)
        elif not self.T > 0:
            raise DomainError(f"T must be positive for {self.kind.value}, got {self.T!r}")
        if self.kind is Kind.TABULATED:
            table = np.asarray(self.table, dtype=float)
            if table.ndim != 2 or table.shape[1] != 2 or len(table) < 2:
                raise DomainError("table must have shape (m >= 2, 2)")
            t = table[:, 0]
            if t[0] != 0.0:
                raise DomainError("table must start at t = 0")
            if table[0, 1] != 0.0:
                raise DomainError("table must start at xi = 0")
            if np.any(np.diff(t) <= 0):
                raise DomainError("table times must be strictly increasing")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)
            object.__setattr__(self, "T", float(t[-1]))
            object.__setattr__(self, "xi_T", float(table[-1, 1]))
        elif self.table is not None:
            raise DomainError(f"table is only valid for Tabulated, not {self.kind.value}")

    @classmethod
    def tabulated(cls, times, xi):
        table = np.column_stack([np.asarray(times, float), np.asarray(xi, float)])
        return cls(Kind.TABULATED, float(table[-1, 1]), float(table[-1, 0]), table)

    @classmethod
    def from_csv(cls, path, params: SystemParams):
        """Read a two-column CSV ``t_over_T0, xi_over_lambda_so`` (header optional)."""
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    if rows:
                        raise DomainError(f"malformed row in {path}: {row}") from None
                except IndexError:
                    raise DomainError(f"expected two columns in {path}: {row}") from None
        if not params.has_spin_orbit:
            raise DomainError("xi_over_lambda_so needs a finite spin-orbit length")
        data = np.array(rows)
        return cls.tabulated(data[:, 0] * params.T0, data[:, 1] * params.lambda_so)

    @classmethod
    def static(cls):
        """The dot that never moves."""
        return cls.tabulated([0.0, 1.0], [0.0, 0.0])

    def __call__(self, t):
        return evaluate(self, t)

    def breakpoints(self):
        """Times in (0, inf) where xi or its derivative is not smooth."""
        if self.kind is Kind.TABULATED:
            return tuple(float(s) for s in self.table[1:, 0])
        if self.kind is Kind.STEP:
            return ()
        return (self.T,)

    def describe(self):
        return f"{self.kind.value}(xi_T={self.xi_T:.6g}, T={self.T:.6g})"


def evaluate(profile: DrivingProfile, t):
    """xi(t) for scalar or array ``t >= 0``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
        raise DomainError("xi(t) is defined for t >= 0 only")
    xi_T, T, kind = profile.xi_T, profile.T, profile.kind
    if kind is Kind.TABULATED:
        tab = profile.table
        out = np.interp(t_arr, tab[:, 0], tab[:, 1], right=xi_T)
    elif kind is Kind.STEP:
        out = np.where(t_arr > 0, xi_T, 0.0)
    elif kind is Kind.TWO_STEP:
        out = np.where(t_arr >= T, xi_T, np.where(t_arr > 0, 0.5 * xi_T, 0.0))
    else:
        s = np.minimum(t_arr, T) / T
        if kind is Kind.LINEAR_RAMP:
            out = xi_T * s
        elif kind is Kind.SINUSOIDAL_SMOOTH:
            out = xi_T * (s - np.sin(2 * np.pi * s) / (2 * np.pi))
        else:
            out = xi_T * (s + np.sin(2 * np.pi * s) / (2 * np.pi))
        out = np.where(t_arr >= T, xi_T, out)
    return float(out) if np.ndim(t) == 0 else out


def velocity(profile: DrivingProfile, t):
    """d xi / dt away from steps (steps contribute no finite velocity)."""
    t_arr = np.asarray(t, dtype=float)
    xi_T, T, kind = profile.xi_T, profile.T, profile.kind
    if kind in (Kind.TWO_STEP, Kind.STEP):
        out = np.zeros_like(t_arr)
    elif kind is Kind.TABULATED:
        tab = profile.table
        slopes = np.diff(tab[:, 1]) / np.diff(tab[:, 0])
        idx = np.clip(np.searchsorted(tab[:, 0], t_arr, side="right") - 1, 0, len(slopes) - 1)
        out = np.where(t_arr < T, slopes[idx], 0.0)
    else:
        phase = 2 * np.pi * np.minimum(t_arr, T) / T
        if kind is Kind.LINEAR_RAMP:
            shape = np.ones_like(t_arr)
        elif kind is Kind.SINUSOIDAL_SMOOTH:
            shape = 1 - np.cos(phase)
        else:
            shape = 1 + np.cos(phase)
        out = np.where(t_arr < T, xi_T / T * shape, 0.0)
    return float(out) if np.ndim(t) == 0 else out


_FLIP_TIME_OVER_T0 = {
    Kind.TWO_STEP: 0.5,
    Kind.LINEAR_RAMP: 1.0,
    Kind.SINUSOIDAL_BROKEN: 1 / math.sqrt(2),
    Kind.SINUSOIDAL_SMOOTH: 2.0,
}


def spin_flip_schedule(kind, params: SystemParams):
    """Shortest residual-free transit time and the spin-flip displacement.

    Returns ``(T, xi_T)`` with ``xi_T = pi * lambda_so / 2``.
    """
    kind = Kind.parse(kind)
    if not params.has_spin_orbit:
        raise DomainError("no spin-orbit coupling; spin-flip undefined")
    if kind not in _FLIP_TIME_OVER_T0:
        raise DomainError(f"no spin-flip schedule for {kind.value}")
    return _FLIP_TIME_OVER_T0[kind] * params.T0, math.pi * params.lambda_so / 2


def spin_flip_profile(kind, params: SystemParams) -> DrivingProfile:
    T, xi_T = spin_flip_schedule(kind, params)
    return DrivingProfile(Kind.parse(kind), xi_T, T)
