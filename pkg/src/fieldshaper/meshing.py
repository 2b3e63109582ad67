"""Structured quadrilateral meshes for the rectangle and annular-sector domains.

Node numbering is row-major: node (i, j) of an (nx, ny) grid has index
``j * (nx + 1) + i`` with i running along the first logical direction
(x, or the angle for sector meshes).  Elements are counter-clockwise
4-node quads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, PointNotFoundError, ValidationError

# 2x2 Gauss points on [-1, 1]^2, tensor-product order (--, +-, ++, -+)
_G = 1.0 / np.sqrt(3.0)
GAUSS_POINTS = np.array([[-_G, -_G], [_G, -_G], [_G, _G], [-_G, _G]])
GAUSS_WEIGHTS = np.ones(4)


def composite_gauss(subdivision: int = 1):
    """2x2 Gauss rule applied on an s x s subdivision of the reference square.

    Returns (points (4 s^2, 2), weights); s = 1 reproduces the plain rule.
    Composite sampling resolves material variation far below the element
    scale (cloak inner-boundary band) without refining the mesh.
    """
    s = int(subdivision)
    if s < 1:
        raise ValidationError("subdivision must be >= 1")
    if s == 1:
        return GAUSS_POINTS.copy(), GAUSS_WEIGHTS.copy()
    centers = -1.0 + (2.0 * np.arange(s) + 1.0) / s
    half = 1.0 / s
    pts = []
    for cy in centers:
        for cx in centers:
            for gx, gy in GAUSS_POINTS:
                pts.append((cx + half * gx, cy + half * gy))
    pts = np.array(pts)
    wts = np.full(4 * s * s, half * half)
    return pts, wts

# bilinear shape functions at local (xi, eta), node order (-1,-1),(1,-1),(1,1),(-1,1)


def shape_functions(xi, eta):
    xi = np.asarray(xi)
    eta = np.asarray(eta)
    return 0.25 * np.stack(
        [(1 - xi) * (1 - eta), (1 + xi) * (1 - eta), (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)],
        axis=-1,
    )


def shape_gradients(xi, eta):
    """d N_k / d(xi, eta), shape (..., 4, 2)."""
    xi = np.asarray(xi)
    eta = np.asarray(eta)
    dxi = 0.25 * np.stack([-(1 - eta), (1 - eta), (1 + eta), -(1 + eta)], axis=-1)
    deta = 0.25 * np.stack([-(1 - xi), -(1 + xi), (1 + xi), (1 - xi)], axis=-1)
    return np.stack([dxi, deta], axis=-1)


@dataclass
class Mesh:
    nodes: np.ndarray  # (n_nodes, 2)
    elements: np.ndarray  # (n_elements, 4), counter-clockwise
    boundary_tags: dict  # tag -> (n_edges, 2) node-index pairs
    grid_shape: tuple  # (nx, ny) logical element counts
    kind: str = "cartesian"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=float)
        self.elements = np.ascontiguousarray(self.elements, dtype=np.int64)
        self._validate_elements()

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def element_coords(self) -> np.ndarray:
        """(n_elements, 4, 2) corner coordinates."""
        return self.nodes[self.elements]

    def diameter(self) -> float:
        lo = self.nodes.min(axis=0)
        hi = self.nodes.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    def _validate_elements(self):
        coords = self.element_coords()
        dN = shape_gradients(GAUSS_POINTS[:, 0], GAUSS_POINTS[:, 1])  # (4, 4, 2)
        # J[e, g, x, l] = d x / d xi_l at Gauss point g of element e
        J = np.einsum("gkl,ekx->egxl", dN, coords)
        det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
        if np.any(det <= 0):
            bad = int(np.argwhere(det <= 0)[0][0])
            raise GeometryError(f"element {bad} has non-positive Jacobian determinant")


def _grid_topology(nx: int, ny: int):
    node_id = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    n00 = node_id[:-1, :-1].ravel()
    n10 = node_id[:-1, 1:].ravel()
    n11 = node_id[1:, 1:].ravel()
    n01 = node_id[1:, :-1].ravel()
    elements = np.column_stack([n00, n10, n11, n01])
    return node_id, elements


def _edge_pairs(ids: np.ndarray) -> np.ndarray:
    return np.column_stack([ids[:-1], ids[1:]])


def build_cartesian_mesh(x_range, y_range, nx: int, ny: int) -> Mesh:
    """Uniform (nx, ny) grid over x_range x y_range with tags left/right/top/bottom."""
    if nx < 1 or ny < 1:
        raise ValidationError(f"element counts must be >= 1, got nx={nx}, ny={ny}")
    x0, x1 = map(float, x_range)
    y0, y1 = map(float, y_range)
    if not (x1 > x0 and y1 > y0):
        raise ValidationError("empty coordinate range")
    x = np.linspace(x0, x1, nx + 1)
    y = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(x, y)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    node_id, elements = _grid_topology(nx, ny)
    tags = {
        "left": _edge_pairs(node_id[:, 0]),
        "right": _edge_pairs(node_id[:, -1]),
        "bottom": _edge_pairs(node_id[0, :]),
        "top": _edge_pairs(node_id[-1, :]),
    }
    return Mesh(nodes, elements, tags, (nx, ny), kind="cartesian", meta={"x": x, "y": y})


def build_annular_sector_mesh(r1: float, r2: float, phi: float, nr: int, ntheta: int) -> Mesh:
    """Annular sector with geometric radial grading, matching the bender map image.

    Radii r_j = r1 * (r2/r1)^(j/nr), angles theta_i = i * phi / ntheta, and the
    node position is (r sin theta, r cos theta): the angle is swept from the
    +y axis so that the mesh coincides with the bender image of a uniform
    rectangle grid.  Tags: "AD" (theta = 0 edge), "CB" (theta = phi edge),
    "inner-arc", "outer-arc".
    """
    if not (0 < r1 < r2):
        raise ValidationError(f"need 0 < r1 < r2, got r1={r1}, r2={r2}")
    if not (0 < phi <= 2 * np.pi):
        raise ValidationError(f"phi must be in (0, 2*pi], got {phi}")
    if nr < 1 or ntheta < 1:
        raise ValidationError("element counts must be >= 1")
    r = r1 * (r2 / r1) ** (np.arange(nr + 1) / nr)
    theta = np.linspace(0.0, phi, ntheta + 1)
    T, R = np.meshgrid(theta, r)
    nodes = np.column_stack([(R * np.sin(T)).ravel(), (R * np.cos(T)).ravel()])
    node_id, elements = _grid_topology(ntheta, nr)
    tags = {
        "AD": _edge_pairs(node_id[:, 0]),
        "CB": _edge_pairs(node_id[:, -1]),
        "inner-arc": _edge_pairs(node_id[0, :]),
        "outer-arc": _edge_pairs(node_id[-1, :]),
    }
    return Mesh(
        nodes,
        elements,
        tags,
        (ntheta, nr),
        kind="sector",
        meta={"r": r, "theta": theta, "r1": r1, "r2": r2, "phi": phi},
    )


def locate_point(mesh: Mesh, point, tol_rel: float = 1e-10):
    """Find (element index, local coords in [-1, 1]^2) containing a point.

    Inverse bilinear map by Newton iteration; residual below 1e-12 of the
    mesh diameter.  Raises PointNotFoundError outside the hull and
    GeometryError on Newton stagnation.
    """
    p = np.asarray(point, dtype=float).reshape(2)
    diam = mesh.diameter()
    tol = tol_rel * diam
    coords = mesh.element_coords()
    lo = coords.min(axis=1)
    hi = coords.max(axis=1)
    candidates = np.nonzero(
        (p[0] >= lo[:, 0] - tol)
        & (p[0] <= hi[:, 0] + tol)
        & (p[1] >= lo[:, 1] - tol)
        & (p[1] <= hi[:, 1] + tol)
    )[0]
    best = None
    for e in candidates:
        xi = _invert_bilinear(coords[e], p, diam)
        if xi is None:
            continue
        overshoot = max(abs(xi[0]), abs(xi[1])) - 1.0
        if overshoot <= 1e-9:
            return int(e), xi
        if best is None or overshoot < best[2]:
            best = (int(e), xi, overshoot)
    if best is not None and best[2] <= tol_rel * 10:
        return best[0], best[1]
    raise PointNotFoundError(f"point {tuple(p)} is outside the mesh hull")


def _invert_bilinear(corners: np.ndarray, p: np.ndarray, diam: float):
    xi = np.zeros(2)
    for _ in range(50):
        N = shape_functions(xi[0], xi[1])
        res = N @ corners - p
        if np.hypot(res[0], res[1]) <= 1e-12 * diam:
            return xi
        dN = shape_gradients(xi[0], xi[1])  # (4, 2)
        J = corners.T @ dN  # d x / d xi
        try:
            step = np.linalg.solve(J, res)
        except np.linalg.LinAlgError:
            return None
        xi = xi - step
        if max(abs(xi[0]), abs(xi[1])) > 3.0:
            return None
    raise GeometryError("Newton iteration for inverse bilinear map did not converge")
