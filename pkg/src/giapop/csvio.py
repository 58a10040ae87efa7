"""CSV formats: trajectory emission/ingestion and experiment files.

Trajectory files are byte-stable: every field is written as '%.8e'
(9 significant digits, scientific notation), '.' decimal point, '\\n'
newlines. Experiment files carry either observed counts
(header t_hours,value) or a dose schedule (header t_hours,dose_uM).
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .control import UM_PER_UGML, DoseSchedule
from .errors import ValidationError
from .sim import Trajectory

TRAJECTORY_HEADER = "t,x1,x2,x2_hat,u_ugml,u_uM,r,envelope,pi"

COUNTS_HEADER = ("t_hours", "value")
SCHEDULE_HEADER = ("t_hours", "dose_uM")


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write a trajectory with fixed formatting; uM column is derived."""
    with open(path, "w", newline="") as f:
        f.write(TRAJECTORY_HEADER + "\n")
        for rec in traj:
            row = (rec.t, rec.x1, rec.x2, rec.x2_hat, rec.u,
                   rec.u * UM_PER_UGML, rec.r, rec.envelope, rec.pi)
            f.write(",".join("%.8e" % v for v in row) + "\n")


def read_trajectory_csv(path) -> Trajectory:
    """Read a trajectory file back into arrays.

    Only the columns are recovered; run metadata (strategy, gains,
    bounds) lives in the run manifest, so the checkers take it
    explicitly. The u_uM column is parsed but not stored: u_ugml is the
    canonical dose.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"trajectory file not found: {path}")
    with open(path, newline="") as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != TRAJECTORY_HEADER:
        raise ValidationError(
            f"bad trajectory header in {path}; expected '{TRAJECTORY_HEADER}'")
    n_cols = len(TRAJECTORY_HEADER.split(","))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != n_cols:
            raise ValidationError(
                f"{path}:{lineno}: expected {n_cols} fields, got {len(parts)}")
        try:
            rows.append([float(x) for x in parts])
        except ValueError as e:
            raise ValidationError(f"{path}:{lineno}: {e}") from e
    arr = np.array(rows, dtype=float).reshape(len(rows), n_cols)
    return Trajectory(
        t=arr[:, 0], x1=arr[:, 1], x2=arr[:, 2], x2_hat=arr[:, 3],
        u=arr[:, 4], r=arr[:, 6], envelope=arr[:, 7], pi=arr[:, 8],
        strategy="from-file")


def read_experiment_csv(path):
    """Read an experiment CSV: counts list or a DoseSchedule, by header.

    Returns list[(t_hours, value)] for counts files and a DoseSchedule
    for schedule files. Times must be strictly increasing.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"experiment file not found: {path}")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        table = list(reader)
    if not table:
        raise ValidationError(f"{path}: empty file, expected a header row")
    header = tuple(h.strip() for h in table[0])
    if header == COUNTS_HEADER:
        kind = "counts"
    elif header == SCHEDULE_HEADER:
        kind = "schedule"
    else:
        raise ValidationError(
            f"{path}: unrecognized header {header}; expected "
            f"{','.join(COUNTS_HEADER)} or {','.join(SCHEDULE_HEADER)}")

    pairs: list[tuple[float, float]] = []
    for lineno, row in enumerate(table[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            t, v = float(row[0]), float(row[1])
        except ValueError as e:
            raise ValidationError(f"{path}:{lineno}: {e}") from e
        if pairs and t <= pairs[-1][0]:
            raise ValidationError(
                f"{path}:{lineno}: time {t} h does not increase over {pairs[-1][0]} h")
        pairs.append((t, v))

    if kind == "counts":
        return pairs
    return DoseSchedule(segments=tuple(pairs))


def read_schedule_csv(path) -> DoseSchedule:
    """read_experiment_csv restricted to schedule files."""
    out = read_experiment_csv(path)
    if not isinstance(out, DoseSchedule):
        raise ValidationError(
            f"{path} holds observed counts, not a dose schedule "
            f"(header {','.join(SCHEDULE_HEADER)})")
    return out


def read_counts_csv(path) -> list[tuple[float, float]]:
    """read_experiment_csv restricted to counts files."""
    out = read_experiment_csv(path)
    if isinstance(out, DoseSchedule):
        raise ValidationError(
            f"{path} holds a dose schedule, not observed counts "
            f"(header {','.join(COUNTS_HEADER)})")
    return out
