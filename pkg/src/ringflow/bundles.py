"""Run bundles: metadata document plus CSV tables.

A bundle directory holds

    metadata.yaml    scenario echo + realized discretization + versions
    snapshots.csv    columns t, x, rho_1..rho_M, r
    diagnostics.csv  columns t, l1_1..M, linf_1..M, tv_r,
                     entropy_max_residual, clamp_count

Numbers are serialized with shortest round-trip precision, '.' decimal
separator, LF line endings; re-parsing reproduces the in-memory doubles
exactly.  Sweep results go to a single sweep.csv next to a metadata file.
"""

from __future__ import annotations

import csv
import math
import platform
from pathlib import Path

import numpy as np
import yaml

from .config import scenario_to_dict
from .harness import SweepResult
from .solver import Trajectory


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _versions() -> dict:
    from . import __version__

    return {
        "ringflow": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


def write_bundle(trajectory: Trajectory, out_dir, entropy_by_step: dict | None = None) -> dict:
    """Write metadata + snapshot + diagnostics files; returns their paths.

    ``entropy_by_step`` optionally maps step index -> max entropy residual;
    diagnostics rows without a value carry nan in that column.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    M = trajectory.scenario.model.n_classes

    meta_path = out / "metadata.yaml"
    metadata = {
        "scenario": scenario_to_dict(trajectory.scenario),
        "realized": trajectory.metadata,
        "snapshot_times": [float(s.t) for s in trajectory.snapshots],
        "versions": _versions(),
    }
    with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(metadata, fh, sort_keys=False)

    snap_path = out / "snapshots.csv"
    with open(snap_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x"] + [f"rho_{i + 1}" for i in range(M)] + ["r"])
        centers = trajectory.grid.centers
        for snap in trajectory.snapshots:
            total = snap.rho.sum(axis=0)
            for j, x in enumerate(centers):
                row = [snap.t, x] + [snap.rho[i, j] for i in range(M)] + [total[j]]
                writer.writerow([_fmt(v) for v in row])

    diag_path = out / "diagnostics.csv"
    with open(diag_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = (
            ["t"]
            + [f"l1_{i + 1}" for i in range(M)]
            + [f"linf_{i + 1}" for i in range(M)]
            + ["tv_r", "entropy_max_residual", "clamp_count"]
        )
        writer.writerow(header)
        diag = trajectory.diagnostics
        if diag is not None:
            entropy_by_step = entropy_by_step or {}
            for k, step in enumerate(diag.steps):
                residual = entropy_by_step.get(int(step), math.nan)
                row = (
                    [diag.t[k]]
                    + list(diag.l1[k])
                    + list(diag.linf[k])
                    + [diag.tv_r[k], residual, int(diag.clamp_count[k])]
                )
                writer.writerow([_fmt(v) for v in row])

    return {"metadata": meta_path, "snapshots": snap_path, "diagnostics": diag_path}


def write_sweep(result: SweepResult, out_dir) -> dict:
    """Write sweep rows as one CSV plus a metadata document."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    meta_path = out / "metadata.yaml"
    with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(
            {
                "kind": result.kind,
                "parameters": list(result.parameters),
                "metadata": _plain(result.metadata),
                "versions": _versions(),
            },
            fh,
            sort_keys=False,
        )

    sweep_path = out / "sweep.csv"
    columns: list[str] = []
    for row in result.rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(sweep_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in result.rows:
            writer.writerow([_fmt(row.get(c, math.nan)) for c in columns])

    return {"metadata": meta_path, "sweep": sweep_path}


def _plain(obj):
    """Recursively convert numpy scalars/arrays for YAML emission."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _read_table(path) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    out: dict[str, np.ndarray] = {}
    for k, name in enumerate(header):
        column = [row[k] for row in rows]
        try:
            out[name] = np.asarray([float(v) for v in column])
        except ValueError:
            out[name] = np.asarray(column)
    return out


def read_snapshots(path) -> dict[str, np.ndarray]:
    return _read_table(path)


def read_diagnostics(path) -> dict[str, np.ndarray]:
    return _read_table(path)


def read_sweep(path) -> dict[str, np.ndarray]:
    return _read_table(path)
