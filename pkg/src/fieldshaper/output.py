"""File emitters: field CSV, legacy VTK, PGM heatmap, contour CSV, metrics JSON.

All writers use fixed float formatting so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .contours import contour_polylines
from .errors import FieldshaperError
from .meshing import Mesh


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_field_csv(path, mesh: Mesh, u) -> None:
    """Header "x,y,u" then one row per node, 17 significant digits."""
    u = np.asarray(u, dtype=float)
    try:
        with open(path, "w") as fh:
            fh.write("x,y,u\n")
            for (x, y), v in zip(mesh.nodes, u):
                fh.write(f"{_fmt(x)},{_fmt(y)},{_fmt(v)}\n")
    except OSError as exc:
        raise FieldshaperError(f"cannot write {path}: {exc}") from exc


def read_field_csv(path):
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    data = data.reshape(-1, 3)
    return data[:, :2], data[:, 2]


def write_vtk(path, mesh: Mesh, u, name: str = "u") -> None:
    """Legacy ASCII VTK structured grid with one scalar point-data array."""
    nx, ny = mesh.grid_shape
    u = np.asarray(u, dtype=float)
    try:
        with open(path, "w") as fh:
            fh.write("# vtk DataFile Version 3.0\n")
            fh.write("fieldshaper output\n")
            fh.write("ASCII\n")
            fh.write("DATASET STRUCTURED_GRID\n")
            fh.write(f"DIMENSIONS {nx + 1} {ny + 1} 1\n")
            fh.write(f"POINTS {mesh.n_nodes} double\n")
            for x, y in mesh.nodes:
                fh.write(f"{_fmt(x)} {_fmt(y)} 0\n")
            fh.write(f"POINT_DATA {mesh.n_nodes}\n")
            fh.write(f"SCALARS {name} double 1\n")
            fh.write("LOOKUP_TABLE default\n")
            for v in u:
                fh.write(f"{_fmt(v)}\n")
    except OSError as exc:
        raise FieldshaperError(f"cannot write {path}: {exc}") from exc


def write_pgm(path, mesh: Mesh, u) -> None:
    """8-bit ASCII PGM heatmap, one pixel per node, linear min-max scaling."""
    nx, ny = mesh.grid_shape
    u = np.asarray(u, dtype=float).reshape(ny + 1, nx + 1)
    lo, hi = u.min(), u.max()
    if hi > lo:
        pix = np.rint((u - lo) / (hi - lo) * 255).astype(int)
    else:
        pix = np.zeros_like(u, dtype=int)
    try:
        with open(path, "w") as fh:
            fh.write("P2\n")
            fh.write(f"{nx + 1} {ny + 1}\n255\n")
            for row in pix[::-1]:  # top row first
                fh.write(" ".join(str(v) for v in row) + "\n")
    except OSError as exc:
        raise FieldshaperError(f"cannot write {path}: {exc}") from exc


def write_contours_csv(path, mesh: Mesh, u, n_levels: int = 20) -> None:
    """Polylines of equispaced iso-levels: columns level, polyline, x, y."""
    lines = contour_polylines(mesh, u, n_levels)
    try:
        with open(path, "w") as fh:
            fh.write("level,polyline,x,y\n")
            for pid, (level, line) in enumerate(lines):
                for x, y in line:
                    fh.write(f"{_fmt(level)},{pid},{_fmt(x)},{_fmt(y)}\n")
    except OSError as exc:
        raise FieldshaperError(f"cannot write {path}: {exc}") from exc


def write_report_json(path, report: dict) -> None:
    """Deterministic metrics report (sorted keys, fixed separators)."""
    try:
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise FieldshaperError(f"cannot write {path}: {exc}") from exc


def emit_outputs(out_dir, mesh: Mesh, solutions: dict, report: dict, prefix: str = "run"):
    """Write every emitter's file for each named solution plus the report.

    Returns the list of written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, sol in solutions.items():
        u = sol.u if hasattr(sol, "u") else sol
        base = os.path.join(out_dir, f"{prefix}_{name}")
        write_field_csv(base + ".csv", mesh, u)
        write_vtk(base + ".vtk", mesh, u)
        write_pgm(base + ".pgm", mesh, u)
        write_contours_csv(base + "_contours.csv", mesh, u)
        written += [base + ext for ext in (".csv", ".vtk", ".pgm", "_contours.csv")]
    report_path = os.path.join(out_dir, f"{prefix}_report.json")
    write_report_json(report_path, report)
    written.append(report_path)
    return written
