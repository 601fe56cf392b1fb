"""Plain-text CSV output with a units comment line."""

from __future__ import annotations

import io
import threading
from pathlib import Path

import numpy as np

UNITS = ("units: hbar = m* = omega = 1; lengths in sigma, energies in hbar*omega, "
         "times in 1/omega (T0 = 2*pi)")

_locks: dict[str, threading.Lock] = {}
_locks_guard = threading.Lock()


def _lock_for(path):
    key = str(Path(path).resolve())
    with _locks_guard:
        return _locks.setdefault(key, threading.Lock())


def format_csv(columns, rows, comments=()):
    buf = io.StringIO()
    for line in (UNITS, *comments):
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size:
        np.savetxt(buf, rows, delimiter=",", fmt="%.12e")
    return buf.getvalue()


def write_csv(path, columns, rows, comments=()):
    """Write ``rows`` under a header; writes to the same path are serialised."""
    path = Path(path)
    text = format_csv(columns, rows, comments)
    with _lock_for(path):
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return path


def read_csv(path):
    """Return ``(columns, data)`` from a file written by :func:`write_csv`."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    columns = lines[0].strip().split(",")
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    return columns, data
