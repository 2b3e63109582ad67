"""Quantitative metrics behind the cloak and bender claims."""

from __future__ import annotations

import numpy as np

from .errors import ComparisonError, NonArrivalError, UnsupportedError, ValidationError
from .meshing import Mesh
from .solver import FieldSolution


def _node_mask(mesh: Mesh, region) -> np.ndarray:
    if region is None:
        return np.ones(mesh.n_nodes, dtype=bool)
    if isinstance(region, np.ndarray) and region.dtype == bool:
        return region
    if hasattr(region, "contains"):
        return region.contains(mesh.nodes)
    return np.asarray(region(mesh.nodes), dtype=bool)


def exterior_mismatch(uA, uB, mesh: Mesh = None, region=None) -> float:
    """Relative nodal L2 difference over a region: ||uA - uB|| / ||uA||, 0/0 -> 0."""
    a = np.asarray(uA.u if isinstance(uA, FieldSolution) else uA, dtype=float)
    b = np.asarray(uB.u if isinstance(uB, FieldSolution) else uB, dtype=float)
    if a.shape != b.shape:
        raise ComparisonError("solutions live on different meshes")
    if mesh is not None and a.shape[0] != mesh.n_nodes:
        raise ComparisonError("solution length does not match the mesh")
    mask = _node_mask(mesh, region) if mesh is not None else np.ones(a.shape[0], bool)
    diff = np.sqrt(np.sum((a[mask] - b[mask]) ** 2))
    ref = np.sqrt(np.sum(a[mask] ** 2))
    if ref == 0.0:
        return 0.0 if diff == 0.0 else float("inf")
    return float(diff / ref)


def crossing_times(times, values, threshold: float) -> np.ndarray:
    """First time each probe series crosses the threshold (linear interpolation)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)  # (nt, n_probes)
    out = np.empty(values.shape[1])
    for p in range(values.shape[1]):
        v = values[:, p]
        above = np.nonzero(v >= threshold)[0]
        if above.size == 0:
            raise NonArrivalError(f"probe {p} never crossed the threshold {threshold}")
        i = above[0]
        if i == 0:
            out[p] = times[0]
        else:
            frac = (threshold - v[i - 1]) / (v[i] - v[i - 1])
            out[p] = times[i - 1] + frac * (times[i] - times[i - 1])
    return out


def arrival_spread(times, values, threshold: float) -> float:
    """(max - min) / mean of threshold-crossing times over the probes."""
    if not (0 < threshold):
        raise ValidationError("threshold must be positive")
    tc = crossing_times(times, values, threshold)
    if tc.size < 2:
        raise ValidationError("need at least 2 probe points")
    mean = tc.mean()
    return float((tc.max() - tc.min()) / mean) if mean > 0 else 0.0


def contour_straightness(mesh: Mesh, solution) -> float:
    """Worst radial-line variation of u, normalized by the global range.

    Only meaningful on annular-sector meshes, where each logical column is a
    radial line; 0 means the field depends on the angle alone (straight
    radial contours).
    """
    if mesh.kind != "sector":
        raise UnsupportedError("contour straightness requires an annular-sector mesh")
    u = np.asarray(solution.u if isinstance(solution, FieldSolution) else solution)
    ntheta, nr = mesh.grid_shape
    grid = u.reshape(nr + 1, ntheta + 1)
    global_range = grid.max() - grid.min()
    if global_range == 0:
        return 0.0
    col_range = grid.max(axis=0) - grid.min(axis=0)
    return float(col_range.max() / global_range)


def region_max_abs(mesh: Mesh, solution, region) -> float:
    """max |u| over nodes inside a region (interior-leakage metric)."""
    u = np.asarray(solution.u if isinstance(solution, FieldSolution) else solution)
    mask = _node_mask(mesh, region)
    if not np.any(mask):
        return 0.0
    return float(np.abs(u[mask]).max())
