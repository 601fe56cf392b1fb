"""Run the closed-form pipeline and the grid oracle on the same time samples."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import observables as obs
from . import oracle
from .classical import trajectory_on
from .core import SystemParams
from .driving import DrivingProfile

TOLERANCES = {"sx": 1e-5, "sy": 1e-5, "sz": 1e-5, "P0": 1e-5, "tz0": 1e-5, "E": 1e-5}


@dataclass
class Comparison:
    times: np.ndarray
    analytic: dict = field(default_factory=dict)
    numeric: dict = field(default_factory=dict)
    grid: oracle.GridSpec | None = None

    def deviations(self):
        return {k: float(np.max(np.abs(self.analytic[k] - self.numeric[k])))
                for k in self.analytic}

    def failures(self, tolerances=None):
        tolerances = TOLERANCES if tolerances is None else tolerances
        dev = self.deviations()
        return {k: v for k, v in dev.items() if k in tolerances and not v < tolerances[k]}

    def to_rows(self):
        cols = [self.times]
        for k in self.analytic:
            cols += [self.analytic[k], self.numeric[k]]
        return np.column_stack(cols)

    def columns(self):
        names = ["t"]
        for k in self.analytic:
            names += [f"{k}_analytic", f"{k}_oracle"]
        return names


def analytic_series(profile: DrivingProfile, params: SystemParams, times):
    traj = trajectory_on(profile, times)
    spin = obs.spin_expectation(traj, params, times)
    ground = obs.pseudo_spin_ground(profile, traj, params, times)
    return {
        "sx": np.asarray(spin.sx, float),
        "sy": np.asarray(spin.sy, float),
        "sz": np.asarray(spin.sz, float),
        "P0": obs.ground_probability(traj, times),
        "tz0": np.asarray(ground.tz, float),
        "E": np.asarray(obs.energy(traj, profile, params, times), float),
    }


def compare(profile: DrivingProfile, params: SystemParams, times,
            grid: oracle.GridSpec | None = None) -> Comparison:
    """Raises :class:`oracle.ConvergenceError` if the oracle cannot be trusted."""
    times = np.asarray(times, dtype=float)
    if grid is None:
        grid = oracle.default_grid(profile, params, times[-1])
    result = Comparison(times, analytic_series(profile, params, times), grid=grid)
    rows = {k: [] for k in result.analytic}
    field0 = oracle.initial_kramers_state(params, grid)
    for t, psi in zip(times, oracle.evolve_samples(field0, profile, params, times)):
        spin = oracle.measure_spin(psi)
        ground = oracle.project_instantaneous(psi, profile, params, t, 0)
        c_up, c_down = ground.c[0]
        rows["sx"].append(spin.sx)
        rows["sy"].append(spin.sy)
        rows["sz"].append(spin.sz)
        rows["P0"].append(ground.p[0])
        rows["tz0"].append(0.5 * (abs(c_up) ** 2 - abs(c_down) ** 2))
        rows["E"].append(oracle.measure_energy(psi, profile, params, t))
    result.numeric = {k: np.array(v) for k, v in rows.items()}
    return result
