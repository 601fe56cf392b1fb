"""Data and plots for the residual-oscillation and adiabaticity panels.

All panels use the display convention sigma = 0.1 * xi_T with the spin-flip
displacement xi_T = pi * lambda_so / 2, i.e. lambda_so = 20/pi sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import observables as obs
from .classical import classical_state, residual_amplitude, trajectory_on
from .core import DomainError, display_params
from .driving import DrivingProfile, Kind, NAMED_KINDS, evaluate
from .io import write_csv

PANELS = ("fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d")
FIG3C_T_OVER_T0 = (2.0, 2.5, 3.5, 4.5, 6.5)
FIG3AB_T_OVER_T0 = (2.0, 5.0)

_LABELS = {
    Kind.TWO_STEP: "two_step",
    Kind.LINEAR_RAMP: "linear_ramp",
    Kind.SINUSOIDAL_BROKEN: "sinusoidal_broken",
    Kind.SINUSOIDAL_SMOOTH: "sinusoidal_smooth",
}


@dataclass
class Panel:
    name: str
    columns: list
    rows: np.ndarray
    xlabel: str
    ylabel: str
    markers: np.ndarray | None = None  # (T/T0, t_min/T, P0_min) bullets

    def column(self, name):
        return self.rows[:, self.columns.index(name)]


def _flip_profile(kind, T_over_T0, params):
    return DrivingProfile(kind, math.pi * params.lambda_so / 2, T_over_T0 * params.T0)


def residual_curves(T_over_T0, params=None):
    """a / xi_T after the stop, per named driving, from the solved trajectories."""
    params = params or display_params()
    out = {}
    for kind in NAMED_KINDS:
        vals = []
        for r in T_over_T0:
            prof = _flip_profile(kind, r, params)
            traj = trajectory_on(prof, [0.0, prof.T])
            vals.append(residual_amplitude(traj, prof.T).relative)
        out[kind] = np.array(vals)
    return out


def time_at_displacement(profile, fraction):
    """Earliest t in [0, T] with xi(t) = fraction * xi_T (profile must be continuous)."""
    if fraction <= 0:
        return 0.0
    if fraction >= 1:
        return profile.T
    target = fraction * profile.xi_T
    return brentq(lambda t: evaluate(profile, t) - target, 0.0, profile.T, xtol=1e-14)


def ground_probability_minimum(profile, n_grid=2001):
    """``(t_min, P0_min)`` of P0(t) over [0, T]: dense scan, then bounded refinement."""
    t = np.linspace(0.0, profile.T, n_grid)
    x_c, v_c = classical_state(profile, t)
    p0 = np.exp(-0.5 * ((x_c - evaluate(profile, t)) ** 2 + v_c**2))
    i = int(np.argmin(p0))
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, n_grid - 1)]

    def f(s):
        xc, vc = classical_state(profile, s)
        return math.exp(-0.5 * ((xc - evaluate(profile, s)) ** 2 + vc**2))

    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if res.fun <= p0[i]:
        return float(res.x), float(res.fun)
    return float(t[i]), float(p0[i])


def fig2a(params=None, T_over_T0=None):
    params = params or display_params()
    r = np.round(np.arange(1, 401) * 0.01, 10) if T_over_T0 is None else np.asarray(T_over_T0)
    curves = residual_curves(r, params)
    cols = ["T_over_T0"] + [f"a_over_xiT_{_LABELS[k]}" for k in NAMED_KINDS]
    rows = np.column_stack([r] + [curves[k] for k in NAMED_KINDS])
    return Panel("fig2a", cols, rows, r"$T/T_0$", r"$a/\xi(T)$")


def fig2b(params=None, T_over_T0=None):
    params = params or display_params()
    a = fig2a(params, T_over_T0)
    xi_T = math.pi * params.lambda_so / 2
    r = a.rows[:, 0]
    p0 = [np.exp(-0.5 * (a.rows[:, j] * xi_T / params.sigma) ** 2) for j in range(1, 5)]
    cols = ["T_over_T0"] + [f"P0_{_LABELS[k]}" for k in NAMED_KINDS]
    return Panel("fig2b", cols, np.column_stack([r] + p0), r"$T/T_0$", r"$P_0(T)$")


def _fig3_curves(quantity, params, n_points):
    fractions = np.linspace(0.0, 1.0, n_points)
    xi_T = math.pi * params.lambda_so / 2
    cols = ["xi_over_xiT", "adiabatic"]
    data = [fractions]
    # adiabatic limit: packet sits at the dot minimum
    angle = 2 * fractions * xi_T / params.lambda_so
    if quantity == "sz":
        data.append(0.5 * obs.spin_attenuation(params) * np.cos(angle))
    else:
        data.append(0.5 * np.cos(angle))
    for kind in (Kind.LINEAR_RAMP, Kind.SINUSOIDAL_SMOOTH):
        for r in FIG3AB_T_OVER_T0:
            prof = _flip_profile(kind, r, params)
            times = np.array([time_at_displacement(prof, f) for f in fractions])
            x_c, v_c = classical_state(prof, times)
            if quantity == "sz":
                vals = (0.5 * obs.spin_attenuation(params)
                        * np.cos(2 * x_c / params.lambda_so))
            else:
                xi = evaluate(prof, times)
                p0 = np.exp(-0.5 * ((x_c - xi) ** 2 + v_c**2))
                vals = 0.5 * np.cos(2 * xi / params.lambda_so) * p0
            cols.append(f"{_LABELS[kind]}_T{r:g}")
            data.append(vals)
    return cols, np.column_stack(data)


def fig3a(params=None, n_points=401):
    params = params or display_params()
    cols, rows = _fig3_curves("sz", params, n_points)
    return Panel("fig3a", cols, rows, r"$\xi/\xi(T)$", r"$S_z$")


def fig3b(params=None, n_points=401):
    params = params or display_params()
    cols, rows = _fig3_curves("tz0", params, n_points)
    return Panel("fig3b", cols, rows, r"$\xi/\xi(T)$", r"$T_z^0$")


def fig3c(params=None, n_points=1001):
    params = params or display_params()
    s = np.linspace(0.0, 1.0, n_points)
    cols, data, markers = ["t_over_T"], [s], []
    for r in FIG3C_T_OVER_T0:
        prof = _flip_profile(Kind.SINUSOIDAL_SMOOTH, r, params)
        traj = trajectory_on(prof, s * prof.T)
        cols.append(f"P0_T{r:g}")
        data.append(obs.ground_probability(traj, s * prof.T))
        t_min, p_min = ground_probability_minimum(prof)
        markers.append((r, t_min / prof.T, p_min))
    return Panel("fig3c", cols, np.column_stack(data), r"$t/T$", r"$P_0(t)$",
                 markers=np.array(markers))


def fig3d(params=None, T_over_T0=None):
    params = params or display_params()
    r = np.round(np.arange(100, 1001) * 0.01, 10) if T_over_T0 is None else np.asarray(T_over_T0)
    rows = []
    for ri in r:
        t_min, p_min = ground_probability_minimum(_flip_profile(Kind.SINUSOIDAL_SMOOTH, ri, params))
        rows.append((ri, t_min / (ri * params.T0), p_min))
    bullets = [(ri, *ground_probability_minimum(
        _flip_profile(Kind.SINUSOIDAL_SMOOTH, ri, params))) for ri in FIG3C_T_OVER_T0]
    markers = np.array([(ri, tm / (ri * params.T0), pm) for ri, tm, pm in bullets])
    return Panel("fig3d", ["T_over_T0", "t_min_over_T", "P0_min"], np.array(rows),
                 r"$T/T_0$", r"$P_{0\,\mathrm{min}}$", markers=markers)


_BUILDERS = {"fig2a": fig2a, "fig2b": fig2b, "fig3a": fig3a, "fig3b": fig3b,
             "fig3c": fig3c, "fig3d": fig3d}


def build(name, params=None) -> Panel:
    if name not in _BUILDERS:
        raise DomainError(f"unknown panel {name!r}; expected one of {list(PANELS)}")
    return _BUILDERS[name](params)


def render(panel: Panel, path):
    """Draw the panel's curves into a PNG at ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    x = panel.rows[:, 0]
    ycols = [c for c in panel.columns[1:] if c != "t_min_over_T"]
    for name in ycols:
        style = {"color": "k", "lw": 1.6} if name == "adiabatic" else {"lw": 1.2}
        ax.plot(x, panel.column(name), label=name, **style)
    if panel.markers is not None and panel.name == "fig3c":
        ax.plot(panel.markers[:, 1], panel.markers[:, 2], "ko", ms=4, label="minimum")
    elif panel.markers is not None:
        ax.plot(panel.markers[:, 0], panel.markers[:, 2], "ko", ms=4)
    ax.set_xlabel(panel.xlabel)
    ax.set_ylabel(panel.ylabel)
    ax.set_xlim(x.min(), x.max())
    if len(ycols) > 1:
        ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def write_panel(panel: Panel, out_dir, plot=True):
    """Write ``<name>.csv`` (plus ``<name>_markers.csv`` and ``<name>.png``)."""
    out_dir = Path(out_dir)
    params = display_params()
    note = f"sigma = 0.1 xi_T, lambda_so = {params.lambda_so:.12g} sigma"
    paths = [write_csv(out_dir / f"{panel.name}.csv", panel.columns, panel.rows, (note,))]
    if panel.markers is not None:
        paths.append(write_csv(out_dir / f"{panel.name}_markers.csv",
                               ["T_over_T0", "t_min_over_T", "P0_min"], panel.markers, (note,)))
    if plot:
        paths.append(render(panel, out_dir / f"{panel.name}.png"))
    return paths
