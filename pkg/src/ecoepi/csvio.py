"""CSV emission with shortest round-trip float formatting."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

TRAJECTORY_HEADER = ("t", "S", "I", "Y")


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return repr(float(v))


def write_rows(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_trajectory(path, t, x) -> None:
    """Write samples as ``t,S,I,Y``; ``x`` has one row per time."""
    x = np.asarray(x, dtype=float)
    write_rows(path, TRAJECTORY_HEADER, (
        (float(ti), *map(float, xi)) for ti, xi in zip(t, x)))


def read_trajectory(path):
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != TRAJECTORY_HEADER:
            raise ValueError(f"unexpected header {header}")
        data = np.array([[float(v) for v in row] for row in r], dtype=float)
    return data[:, 0], data[:, 1:]


def write_multipliers(path, multipliers) -> None:
    write_rows(path, ("index", "real", "imag", "modulus"), (
        (str(i), z.real, z.imag, abs(z)) for i, z in enumerate(np.asarray(multipliers, complex))))


def write_key_values(path, rows) -> None:
    write_rows(path, ("quantity", "value"), ((k, v) for k, v in rows))
