"""Command-line interface: ``qdshuttle {simulate,figures,compare,sweep,schedule}``.

Exit codes: 0 ok, 1 usage, 2 invalid scenario, 3 tolerance failure,
4 oracle convergence failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import figures, scenario
from . import observables as obs
from .classical import residual_amplitude, trajectory_on
from .compare import TOLERANCES, compare
from .core import DomainError
from .driving import NAMED_KINDS, DrivingProfile, Kind, spin_flip_schedule
from .io import write_csv
from .oracle import ConvergenceError, default_grid

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_TOLERANCE, EXIT_CONVERGENCE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common():
    p = _Parser(add_help=False)
    p.add_argument("--config", type=Path, help="scenario JSON file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--grid-points", type=int, help="oracle grid size (power of two)")
    p.add_argument("--dt-over-T0", type=float, help="oracle time step in units of T0")
    p.add_argument("--seed", type=int, help="accepted for compatibility; runs are deterministic")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a scenario key, e.g. profile.T_over_T0=2")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="qdshuttle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common],
                   help="write observable, trajectory and occupation CSVs")

    p = sub.add_parser("figures", parents=[common], help="regenerate figure data and plots")
    p.add_argument("panels", nargs="*", metavar="PANEL",
                   help=f"subset of {', '.join(figures.PANELS)} (default: all)")
    p.add_argument("--no-plots", action="store_true", help="write CSVs only")

    sub.add_parser("compare", parents=[common], help="closed form vs grid oracle")

    p = sub.add_parser("sweep", parents=[common], help="final-state observables over a range")
    p.add_argument("--axis", choices=["T_over_T0", "lambda_so_over_sigma"], required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--workers", type=int, default=4)

    sub.add_parser("schedule", parents=[common], help="print residual-free spin-flip times")
    return parser


def _overrides(args):
    items = list(args.set)
    if args.grid_points is not None:
        items.append(f"grid.n_points={args.grid_points}")
    if args.dt_over_T0 is not None:
        items.append(f"grid.dt_over_T0={args.dt_over_T0!r}")
    return items


def _param_note(sc):
    p = sc.params
    notes = [f"profile: {sc.profile.describe()}", f"lambda_so = {p.lambda_so:.12g} sigma",
             f"beta_over_alpha = {p.beta_over_alpha:.12g}"]
    if p.sigma_nm is not None:
        notes.append(f"sigma = {p.sigma_nm:.6g} nm, hbar*omega = {p.omega_meV:.6g} meV, "
                     f"1/omega = {p.time_unit_ps:.6g} ps")
    return tuple(notes)


def observable_table(sc, times):
    """Columns ``t`` plus the scenario's observables on ``times``."""
    prof, params = sc.profile, sc.params
    traj = trajectory_on(prof, times)
    spin = obs.spin_expectation(traj, params, times)
    pseudo = obs.pseudo_spin(prof, params, times)
    values = {
        "xi": traj.xi, "x_c": traj.x_c, "v_c": traj.v_c,
        "sx": spin.sx, "sy": spin.sy, "sz": spin.sz,
        "tx": pseudo.tx, "ty": pseudo.ty, "tz": pseudo.tz,
        "tz0": obs.pseudo_spin_ground(prof, traj, params, times).tz,
        "P0": obs.ground_probability(traj, times),
        "E": obs.energy(traj, prof, params, times),
    }
    cols = ["t"] + list(sc.observables)
    rows = np.column_stack([times] + [np.broadcast_to(values[c], times.shape)
                                      for c in sc.observables])
    return cols, rows, traj


def cmd_simulate(args, sc):
    times = np.linspace(0.0, sc.t_end, sc.n_samples)
    cols, rows, traj = observable_table(sc, times)
    note = _param_note(sc)
    out = args.out
    write_csv(out / "observables.csv", cols, rows, note)
    write_csv(out / "trajectory.csv", ["t", "xi", "x_c", "v_c", "phase"], traj.to_rows(), note)
    occ = obs.occupations(traj, sc.profile, sc.params, sc.t_end, sc.n_max)
    write_csv(out / "occupations.csv", ["n", "P_n"], occ.to_rows(),
              note + (f"t = {sc.t_end:.12g}", f"mean_nu = {occ.mean_nu:.12g}"))
    print(f"wrote {out / 'observables.csv'} ({len(times)} rows), trajectory.csv, occupations.csv")
    final = dict(zip(cols, rows[-1]))
    print("final: " + ", ".join(f"{k}={v:.9g}" for k, v in final.items()))
    return EXIT_OK


def cmd_figures(args, sc):
    panels = args.panels or list(figures.PANELS)
    for name in panels:
        if name not in figures.PANELS:
            raise DomainError(f"unknown panel {name!r}; expected one of {list(figures.PANELS)}")
    for name in panels:
        panel = figures.build(name)
        for path in figures.write_panel(panel, args.out, plot=not args.no_plots):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_compare(args, sc):
    times = np.linspace(0.0, sc.t_end, sc.n_samples)
    grid = default_grid(sc.profile, sc.params, sc.t_end, n_points=sc.n_points,
                        dt_over_T0=sc.dt_over_T0, margin=sc.margin)
    try:
        result = compare(sc.profile, sc.params, times, grid)
    except ConvergenceError as exc:
        print(f"oracle convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    write_csv(args.out / "compare.csv", result.columns(), result.to_rows(), _param_note(sc))
    failures = result.failures()
    print(f"{sc.profile.describe()}; grid {grid.n_points} points on "
          f"[{grid.x_min:.4g}, {grid.x_max:.4g}], dt = {grid.dt / sc.params.T0:.3g} T0")
    for name, dev in result.deviations().items():
        tol = TOLERANCES.get(name)
        status = "FAIL" if name in failures else "ok"
        print(f"  {name:>4}  max|dev| = {dev:.3e}  tol = {tol:.0e}  {status}")
    if failures:
        print("tolerance failure: " + ", ".join(sorted(failures)), file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def sweep_point(sc, axis, value):
    """Final-state row ``(value, a, a/xi_T, P0, sz, tz, E)`` for one sweep point."""
    params, prof = sc.params, sc.profile
    if axis == "T_over_T0":
        if prof.kind is Kind.TABULATED:
            raise DomainError("T_over_T0 sweeps need a named profile kind")
        prof = DrivingProfile(prof.kind, prof.xi_T, value * params.T0)
    else:
        ratio = prof.xi_T / params.lambda_so if params.has_spin_orbit else 0.0
        params = replace(params, lambda_so=value)
        # a displacement given in sigma stays put; one given in lambda_so follows it
        fixed = "xi_T_over_sigma" in sc.source.get("profile", {})
        if prof.kind is not Kind.TABULATED and not fixed:
            prof = DrivingProfile(prof.kind, ratio * params.lambda_so, prof.T)
    # a step at T = 0 is read just after it happens
    t_final = prof.T if prof.T > 0 else math.ulp(0.0)
    traj = trajectory_on(prof, [0.0, t_final])
    res = residual_amplitude(traj, t_final)
    sz = obs.spin_expectation(traj, params, t_final).sz
    tz = obs.pseudo_spin(prof, params, t_final).tz
    p0 = obs.ground_probability(traj, t_final)
    e = obs.energy(traj, prof, params, t_final)
    return (value, res.a, res.relative, float(p0), float(sz), float(tz), float(e))


def cmd_sweep(args, sc):
    if args.steps < 2:
        raise DomainError(f"--steps must be >= 2, got {args.steps}")
    if not args.stop > args.start or not args.start > 0:
        raise DomainError(f"empty or non-positive range [{args.start}, {args.stop}]")
    values = np.linspace(args.start, args.stop, args.steps)
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        rows = list(pool.map(lambda v: sweep_point(sc, args.axis, float(v)), values))
    cols = [args.axis, "a", "a_over_xiT", "P0", "sz", "tz", "E"]
    path = write_csv(args.out / "sweep.csv", cols, np.array(rows), _param_note(sc))
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_schedule(args, sc):
    params = sc.params
    cols = ["kind", "T_over_T0", "xi_T_over_lambda_so", "a_over_xiT", "sz_final"]
    print(",".join(cols))
    for kind in NAMED_KINDS:
        T, xi_T = spin_flip_schedule(kind, params)
        prof = DrivingProfile(kind, xi_T, T)
        traj = trajectory_on(prof, [0.0, T])
        rel = residual_amplitude(traj, T).relative
        sz = obs.spin_expectation(traj, params, T).sz
        print(f"{kind.value},{T / params.T0:.12g},{xi_T / params.lambda_so:.12g},"
              f"{rel:.3e},{sz:.12g}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "figures": cmd_figures, "compare": cmd_compare,
            "sweep": cmd_sweep, "schedule": cmd_schedule}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        sc = scenario.load(args.config, _overrides(args))
        return COMMANDS[args.command](args, sc)
    except DomainError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
