"""Bilinear-quad finite element solver for the diffusion-reaction field equation.

Weak form of  rho du/dt = div(alpha grad u) - beta u + f :

    M du/dt + K u = b,   K_ij = int grad(phi_i).alpha grad(phi_j) + beta phi_i phi_j
                         M_ij = int rho phi_i phi_j
                         b_i  = int f phi_i + Neumann boundary terms.

Materials are sampled per Gauss point, so coefficient jumps need no special
meshing.  Dirichlet rows are eliminated symmetrically to keep the reduced
system CG-friendly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import ConfigError, MaterialError, SetupError, SolverError
from .materials import ParameterField
from .meshing import Mesh, composite_gauss, locate_point, shape_functions

_PSD_TOL = 1e-10


@dataclass(frozen=True)
class Dirichlet:
    """Fixed field value on a boundary tag; scalar or callable(x, y)."""

    value: object = 0.0

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        if callable(self.value):
            return np.asarray([self.value(x, y) for x, y in pts], dtype=float)
        return np.full(pts.shape[0], float(self.value))


@dataclass(frozen=True)
class Neumann:
    """Prescribed outward flux on a boundary tag; 0 means insulated."""

    flux: float = 0.0


@dataclass
class FieldSolution:
    """Nodal field values; transient runs carry (time, values) snapshots."""

    u: np.ndarray
    snapshots: Optional[list] = None

    def at_time(self, t: float) -> np.ndarray:
        if self.snapshots is None:
            raise SetupError("solution has no time series")
        times = np.array([s[0] for s in self.snapshots])
        i = int(np.argmin(np.abs(times - t)))
        return self.snapshots[i][1]


@dataclass
class AssembledSystem:
    mesh: Mesh
    K: sp.csr_matrix
    M: sp.csr_matrix
    b: np.ndarray
    dirichlet_nodes: np.ndarray
    dirichlet_values: np.ndarray
    free: np.ndarray


def gauss_physical_points(mesh: Mesh, qpts=None) -> np.ndarray:
    """(ne, nq, 2) coordinates of the quadrature points of every element."""
    if qpts is None:
        qpts, _ = composite_gauss(1)
    N = shape_functions(qpts[:, 0], qpts[:, 1])  # (nq, 4)
    return np.einsum("gk,ekx->egx", N, mesh.element_coords())


def assemble_system(
    mesh: Mesh, params: ParameterField, bcs: dict, material_subdivision: int = 1
) -> AssembledSystem:
    """Assemble K, M, b and the Dirichlet constraint set.

    ``bcs`` maps every boundary tag of the mesh to a Dirichlet or Neumann
    condition; missing or unknown tags are a config error.
    ``material_subdivision`` > 1 integrates with a composite 2x2 Gauss rule
    on an s x s split of each element, resolving material bands far below
    the element scale without refining the mesh.
    """
    missing = set(mesh.boundary_tags) - set(bcs)
    if missing:
        raise ConfigError(f"boundary tags without a condition: {sorted(missing)}")
    unknown = set(bcs) - set(mesh.boundary_tags)
    if unknown:
        raise ConfigError(f"conditions for unknown boundary tags: {sorted(unknown)}")

    qpts, qwts = composite_gauss(material_subdivision)
    nq = qpts.shape[0]
    pts = gauss_physical_points(mesh, qpts)
    ne = mesh.n_elements
    mat = params.sample_arrays(pts.reshape(-1, 2))
    rho, a11, a12, a22, beta, f = (
        np.ascontiguousarray(a.reshape(ne, nq), dtype=float) for a in mat
    )
    scale = np.maximum(np.maximum(np.abs(a11), np.abs(a22)), 1.0)
    if np.any(a11 < -_PSD_TOL) or np.any(a22 < -_PSD_TOL) or np.any(
        a11 * a22 - a12**2 < -_PSD_TOL * scale**2
    ):
        raise MaterialError("sampled diffusion tensor is not positive semi-definite")

    coords = np.ascontiguousarray(mesh.element_coords())
    Ke, Me, be = kernels.element_matrices(
        coords, rho, a11, a12, a22, beta, f, qpts, np.ascontiguousarray(qwts)
    )

    conn = mesh.elements
    rows = np.repeat(conn, 4, axis=1).ravel()
    cols = np.tile(conn, (1, 4)).ravel()
    n = mesh.n_nodes
    K = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((Me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    b = np.zeros(n)
    np.add.at(b, conn.ravel(), be.ravel())

    dirichlet: dict[int, float] = {}
    for tag in sorted(bcs):
        cond = bcs[tag]
        edges = mesh.boundary_tags[tag]
        if isinstance(cond, Neumann):
            if cond.flux != 0.0:
                p0 = mesh.nodes[edges[:, 0]]
                p1 = mesh.nodes[edges[:, 1]]
                half = 0.5 * cond.flux * np.hypot(*(p1 - p0).T)
                np.add.at(b, edges[:, 0], half)
                np.add.at(b, edges[:, 1], half)
        elif isinstance(cond, Dirichlet):
            node_ids = np.unique(edges.ravel())
            values = cond.evaluate(mesh.nodes[node_ids])
            for nid, val in zip(node_ids, values):
                dirichlet[int(nid)] = float(val)
        else:
            raise ConfigError(f"tag {tag!r}: condition must be Dirichlet or Neumann")

    d_nodes = np.array(sorted(dirichlet), dtype=np.int64)
    d_values = np.array([dirichlet[i] for i in d_nodes], dtype=float)
    free = np.setdiff1d(np.arange(n), d_nodes)
    return AssembledSystem(mesh, K, M, b, d_nodes, d_values, free)


def _reduced(system: AssembledSystem, A: sp.csr_matrix):
    """Restrict A u = rhs to free dofs, moving known Dirichlet columns to the rhs."""
    free, dn = system.free, system.dirichlet_nodes
    A_ff = A[free][:, free].tocsr()
    if dn.size:
        shift = A[free][:, dn] @ system.dirichlet_values
    else:
        shift = np.zeros(free.size)
    return A_ff, shift


def _cg_solve(A_ff: sp.csr_matrix, rhs: np.ndarray, x0=None) -> np.ndarray:
    diag = A_ff.diagonal()
    if A_ff.shape[0] == 0:
        return np.zeros(0)
    if np.any(diag <= 0):
        raise SetupError("system matrix has non-positive diagonal (singular setup)")
    precond = spla.LinearOperator(A_ff.shape, matvec=lambda v: v / diag)
    maxiter = max(20 * A_ff.shape[0], 100)
    x, info = spla.cg(A_ff, rhs, x0=x0, rtol=1e-10, atol=0.0, maxiter=maxiter, M=precond)
    if info > 0:
        raise SolverError(f"CG did not converge within {maxiter} iterations")
    if info < 0:
        raise SetupError("CG reported an invalid system")
    return x


def solve_steady(system: AssembledSystem, method: str = "cg") -> FieldSolution:
    """Solve K u = b with Dirichlet values eliminated.

    ``method='cg'`` is Jacobi-preconditioned conjugate gradients (relative
    residual 1e-10, zero initial guess); ``method='direct'`` is a sparse LU
    factorization, used by large heterogeneous experiment runs.
    """
    K_ff, shift = _reduced(system, system.K)
    rhs = system.b[system.free] - shift
    if method == "cg":
        x = _cg_solve(K_ff, rhs)
    elif method == "direct":
        x = _direct_solve(K_ff, rhs)
    else:
        raise ConfigError(f"unknown solve method {method!r}")
    u = np.zeros(system.mesh.n_nodes)
    u[system.free] = x
    u[system.dirichlet_nodes] = system.dirichlet_values
    if not np.all(np.isfinite(u)):
        raise SolverError("steady solve produced non-finite values")
    return FieldSolution(u=u)


def _direct_solve(A_ff, rhs):
    if A_ff.shape[0] == 0:
        return np.zeros(0)
    try:
        return spla.splu(A_ff.tocsc()).solve(rhs)
    except RuntimeError as exc:
        raise SetupError(f"direct factorization failed: {exc}") from exc


def run_transient(
    system: AssembledSystem,
    u0,
    dt: float,
    t_end: float,
    snapshot_times=None,
    method: str = "direct",
) -> FieldSolution:
    """Backward Euler: (M + dt K) u^{n+1} = M u^n + dt b, Dirichlet held fixed.

    ``snapshot_times`` may be a sequence of times (linearly interpolated
    between the bracketing steps) or "all" to record every step; the state
    at t_end is always recorded last.
    """
    if dt <= 0 or t_end <= 0:
        raise SetupError("dt and t_end must be positive")
    nsteps = max(1, round(t_end / dt))
    dt = t_end / nsteps

    u = np.array(u0.u if isinstance(u0, FieldSolution) else u0, dtype=float)
    if u.shape != (system.mesh.n_nodes,):
        raise SetupError("initial condition length does not match the mesh")

    free = system.free
    M_diag_free = system.M[free][:, free].diagonal()
    if free.size and np.any(M_diag_free <= 0):
        raise SetupError("transient stepping requires rho > 0 on all free nodes")

    A = (system.M + dt * system.K).tocsr()
    A_ff, shift = _reduced(system, A)
    rhs_const = dt * system.b[system.free] - shift
    if method == "direct":
        lu = spla.splu(A_ff.tocsc()) if free.size else None
        step_solve = (lambda r, x0: lu.solve(r)) if lu is not None else (lambda r, x0: r[:0])
    elif method == "cg":
        step_solve = lambda r, x0: _cg_solve(A_ff, r, x0=x0)
    else:
        raise ConfigError(f"unknown solve method {method!r}")

    record_all = snapshot_times == "all"
    wanted = [] if (snapshot_times is None or record_all) else sorted(snapshot_times)
    snapshots = []
    u[system.dirichlet_nodes] = system.dirichlet_values
    if record_all:
        snapshots.append((0.0, u.copy()))

    t_prev, u_prev = 0.0, u.copy()
    wi = 0
    M_free_rows = system.M[free]
    for n in range(1, nsteps + 1):
        t = n * dt
        rhs = M_free_rows @ u + rhs_const
        x = step_solve(rhs, u[free])
        u = u.copy()
        u[free] = x
        u[system.dirichlet_nodes] = system.dirichlet_values
        if record_all:
            snapshots.append((t, u.copy()))
        while wi < len(wanted) and wanted[wi] <= t + 1e-12:
            tw = wanted[wi]
            if tw <= t_prev + 1e-15:
                snapshots.append((tw, u_prev.copy()))
            else:
                frac = (tw - t_prev) / (t - t_prev)
                snapshots.append((tw, (1 - frac) * u_prev + frac * u))
            wi += 1
        t_prev, u_prev = t, u
    if not snapshots or snapshots[-1][0] < t_end - 1e-12:
        snapshots.append((t_end, u.copy()))
    if not np.all(np.isfinite(u)):
        raise SolverError("transient solve produced non-finite values")
    return FieldSolution(u=u, snapshots=snapshots)


def sample_solution(mesh: Mesh, solution: FieldSolution, point) -> float:
    """Bilinear interpolation of nodal values at an arbitrary point."""
    e, xi = locate_point(mesh, point)
    N = shape_functions(xi[0], xi[1])
    return float(N @ solution.u[mesh.elements[e]])
