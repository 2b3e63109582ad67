"""Marching-squares contour extraction on structured (possibly curvilinear) grids."""

from __future__ import annotations

import numpy as np

from .meshing import Mesh

# corner order within a cell: (j, i), (j, i+1), (j+1, i+1), (j+1, i)
_CELL_EDGES = ((0, 1), (1, 2), (2, 3), (3, 0))


def _grid_arrays(mesh: Mesh, u: np.ndarray):
    nx, ny = mesh.grid_shape
    X = mesh.nodes[:, 0].reshape(ny + 1, nx + 1)
    Y = mesh.nodes[:, 1].reshape(ny + 1, nx + 1)
    U = np.asarray(u, dtype=float).reshape(ny + 1, nx + 1)
    return X, Y, U


def contour_segments(mesh: Mesh, u, level: float) -> list:
    """Line segments ((x0, y0), (x1, y1)) of the iso-line u = level."""
    X, Y, U = _grid_arrays(mesh, u)
    ny, nx = U.shape[0] - 1, U.shape[1] - 1
    segments = []
    for j in range(ny):
        for i in range(nx):
            vals = (U[j, i], U[j, i + 1], U[j + 1, i + 1], U[j + 1, i])
            pos = (
                (X[j, i], Y[j, i]),
                (X[j, i + 1], Y[j, i + 1]),
                (X[j + 1, i + 1], Y[j + 1, i + 1]),
                (X[j + 1, i], Y[j + 1, i]),
            )
            above = [v > level for v in vals]
            if all(above) or not any(above):
                continue
            crossings = []
            for e, (a, b) in enumerate(_CELL_EDGES):
                if above[a] != above[b]:
                    frac = (level - vals[a]) / (vals[b] - vals[a])
                    crossings.append(
                        (
                            e,
                            (
                                pos[a][0] + frac * (pos[b][0] - pos[a][0]),
                                pos[a][1] + frac * (pos[b][1] - pos[a][1]),
                            ),
                        )
                    )
            if len(crossings) == 2:
                segments.append((crossings[0][1], crossings[1][1]))
            elif len(crossings) == 4:
                # saddle cell: disambiguate with the center value
                center_above = 0.25 * sum(vals) > level
                crossings.sort(key=lambda c: c[0])
                if center_above == above[0]:
                    pairs = ((0, 1), (2, 3))
                else:
                    pairs = ((0, 3), (1, 2))
                for a, b in pairs:
                    segments.append((crossings[a][1], crossings[b][1]))
    return segments


def chain_segments(segments, tol: float = 1e-9) -> list:
    """Join shared-endpoint segments into polylines (lists of (x, y) points)."""

    def key(p):
        return (round(p[0] / tol), round(p[1] / tol))

    endpoints: dict = {}
    for s, (p, q) in enumerate(segments):
        endpoints.setdefault(key(p), []).append((s, 0))
        endpoints.setdefault(key(q), []).append((s, 1))

    used = [False] * len(segments)
    polylines = []
    for s0 in range(len(segments)):
        if used[s0]:
            continue
        used[s0] = True
        line = [segments[s0][0], segments[s0][1]]
        for reverse in (False, True):
            if reverse:
                line.reverse()
            while True:
                k = key(line[-1])
                nxt = next(
                    ((s, end) for s, end in endpoints.get(k, []) if not used[s]), None
                )
                if nxt is None:
                    break
                s, end = nxt
                used[s] = True
                line.append(segments[s][1 - end])
        polylines.append(line)
    return polylines


def contour_levels(u, n_levels: int = 20) -> np.ndarray:
    """n equispaced interior levels between min(u) and max(u)."""
    u = np.asarray(u, dtype=float)
    lo, hi = float(u.min()), float(u.max())
    if hi <= lo:
        return np.array([])
    return np.linspace(lo, hi, n_levels + 2)[1:-1]


def contour_polylines(mesh: Mesh, u, n_levels: int = 20) -> list:
    """[(level, polyline), ...] over equispaced levels."""
    out = []
    for level in contour_levels(u, n_levels):
        for line in chain_segments(contour_segments(mesh, u, level)):
            out.append((float(level), line))
    return out
