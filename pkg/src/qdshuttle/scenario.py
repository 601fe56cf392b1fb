"""JSON scenario files.

Example::

    {
      "params": {"mass_ratio": 0.015, "omega_meV": 10, "lambda_so_nm": 150},
      "profile": {"kind": "SinusoidalSmooth", "T_over_T0": 2},
      "t_end_over_T0": 2.5,
      "n_samples": 201,
      "grid": {"n_points": 2048, "dt_over_T0": 1e-4}
    }

``params`` may instead hold ``lambda_so_over_sigma``. ``profile`` takes
``kind``, ``T_over_T0`` and ``xi_T_over_lambda_so`` (default pi/2, the spin
flip); a ``Tabulated`` profile reads ``csv`` (relative to the scenario file).
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .core import DomainError, SystemParams
from .driving import DrivingProfile, Kind
from .oracle import DEFAULT_DT_OVER_T0, DEFAULT_POINTS

OBSERVABLES = ("xi", "x_c", "v_c", "sx", "sy", "sz", "tx", "ty", "tz", "tz0", "P0", "E")

DEFAULT = {
    "params": {"lambda_so_over_sigma": 10.0},
    "profile": {"kind": "SinusoidalSmooth", "T_over_T0": 2.0},
    "n_samples": 201,
    "observables": ["sx", "sy", "sz", "tx", "tz", "tz0", "P0", "E"],
    "grid": {},
}

_TOP_KEYS = {"params", "profile", "t_end_over_T0", "n_samples", "observables", "grid", "n_max"}
_PROFILE_KEYS = {"kind", "T_over_T0", "xi_T_over_lambda_so", "xi_T_over_sigma", "csv"}
_GRID_KEYS = {"n_points", "dt_over_T0", "margin"}


@dataclass
class Scenario:
    params: SystemParams
    profile: DrivingProfile
    t_end: float
    n_samples: int
    observables: tuple
    n_points: int
    dt_over_T0: float
    margin: float
    n_max: int | None
    source: dict


def load(path=None, overrides=()):
    """Read a scenario file (or the built-in default) and apply ``key=value`` overrides."""
    data = copy.deepcopy(DEFAULT)
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        try:
            loaded = json.loads(path.read_text())
        except FileNotFoundError:
            raise DomainError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise DomainError(f"config is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise DomainError("config must be a JSON object")
        data.update(loaded)
        base = path.parent
    for item in overrides:
        apply_override(data, item)
    return build(data, base)


def apply_override(data, item):
    """Set a dotted key from ``"profile.T_over_T0=2"``; values are parsed as JSON when possible."""
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise DomainError(f"override must look like key=value, got {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = data
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise DomainError(f"cannot override {key!r}: {part!r} is not a section")
    node[parts[-1]] = value


def _number(section, key, value, positive=False, allow_zero=True):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{section}{key} must be a number, got {value!r}") from None
    if not math.isfinite(value) or (positive and (value < 0 or (value == 0 and not allow_zero))):
        raise DomainError(f"{section}{key} must be {'positive' if positive else 'finite'}, "
                          f"got {value!r}")
    return value


def build(data, base=Path(".")):
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    if not isinstance(data.get("params"), dict):
        raise DomainError("params must be an object")
    try:
        params = SystemParams.from_mapping(data["params"])
    except DomainError as exc:
        raise DomainError(f"params: {exc}") from None

    prof = data.get("profile")
    if not isinstance(prof, dict):
        raise DomainError("profile must be an object")
    unknown = set(prof) - _PROFILE_KEYS
    if unknown:
        raise DomainError(f"unknown profile keys: {sorted(unknown)}")
    try:
        kind = Kind.parse(prof.get("kind", "SinusoidalSmooth"))
    except DomainError as exc:
        raise DomainError(f"profile.kind: {exc}") from None
    if kind is Kind.TABULATED:
        if "csv" not in prof:
            raise DomainError("profile.csv is required for Tabulated profiles")
        csv_path = Path(prof["csv"])
        if not csv_path.is_absolute():
            csv_path = base / csv_path
        if not csv_path.exists():
            raise DomainError(f"profile.csv not found: {csv_path}")
        profile = DrivingProfile.from_csv(csv_path, params)
    else:
        if "xi_T_over_sigma" in prof:
            xi_T = _number("profile.", "xi_T_over_sigma", prof["xi_T_over_sigma"])
        else:
            ratio = _number("profile.", "xi_T_over_lambda_so",
                            prof.get("xi_T_over_lambda_so", math.pi / 2))
            if not params.has_spin_orbit and ratio != 0:
                raise DomainError("profile.xi_T_over_lambda_so needs a finite spin-orbit "
                                  "length; use xi_T_over_sigma")
            xi_T = ratio * params.lambda_so if ratio else 0.0
        if kind is Kind.STEP:
            T = 0.0
        else:
            T = _number("profile.", "T_over_T0", prof.get("T_over_T0", 1.0),
                        positive=True, allow_zero=False) * params.T0
        profile = DrivingProfile(kind, xi_T, T)

    default_end = profile.T / params.T0 if profile.T > 0 else 1.0
    t_end = _number("", "t_end_over_T0", data.get("t_end_over_T0", default_end),
                    positive=True, allow_zero=False) * params.T0
    n_samples = data.get("n_samples", 201)
    if not isinstance(n_samples, int) or n_samples < 2:
        raise DomainError(f"n_samples must be an integer >= 2, got {n_samples!r}")
    observables = data.get("observables", DEFAULT["observables"])
    if isinstance(observables, str):
        observables = [observables]
    bad = [o for o in observables if o not in OBSERVABLES]
    if bad:
        raise DomainError(f"observables: unknown {bad}; expected a subset of {list(OBSERVABLES)}")

    grid = data.get("grid") or {}
    if not isinstance(grid, dict):
        raise DomainError("grid must be an object")
    unknown = set(grid) - _GRID_KEYS
    if unknown:
        raise DomainError(f"unknown grid keys: {sorted(unknown)}")
    n_points = grid.get("n_points", DEFAULT_POINTS)
    if not isinstance(n_points, int) or n_points < 256 or n_points & (n_points - 1):
        raise DomainError(f"grid.n_points must be a power of two >= 256, got {n_points!r}")
    dt_over_T0 = _number("grid.", "dt_over_T0", grid.get("dt_over_T0", DEFAULT_DT_OVER_T0),
                         positive=True, allow_zero=False)
    margin = _number("grid.", "margin", grid.get("margin", 10.0), positive=True, allow_zero=False)
    n_max = data.get("n_max")
    if n_max is not None and (not isinstance(n_max, int) or n_max < 0):
        raise DomainError(f"n_max must be a non-negative integer, got {n_max!r}")
    return Scenario(params, profile, t_end, n_samples, tuple(observables), n_points,
                    dt_over_T0, margin, n_max, data)
