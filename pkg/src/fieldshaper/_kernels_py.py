"""Pure-numpy element matrix kernel (fallback when the compiled one is absent).

Computes per-element stiffness+reaction matrices, mass matrices, and load
vectors for bilinear quads over an arbitrary quadrature rule.  Material
values are supplied per quadrature point so heterogeneous coefficients need
no callbacks inside the hot loop.
"""

import numpy as np

from .meshing import shape_functions, shape_gradients


def element_matrices(coords, rho, a11, a12, a22, beta, f, qpts, qwts):
    """Element integrals for all elements at once.

    Parameters
    ----------
    coords : (ne, 4, 2) corner coordinates
    rho, a11, a12, a22, beta, f : (ne, nq) material values at the quadrature points
    qpts : (nq, 2) quadrature points on [-1, 1]^2
    qwts : (nq,) quadrature weights

    Returns
    -------
    Ke : (ne, 4, 4)  integral of grad(phi_i) . alpha grad(phi_j) + beta phi_i phi_j
    Me : (ne, 4, 4)  integral of rho phi_i phi_j
    be : (ne, 4)     integral of f phi_i
    """
    ne = coords.shape[0]
    Ke = np.zeros((ne, 4, 4))
    Me = np.zeros((ne, 4, 4))
    be = np.zeros((ne, 4))
    for g in range(qpts.shape[0]):
        xi, eta = qpts[g]
        w = qwts[g]
        N = shape_functions(xi, eta)  # (4,)
        dN = shape_gradients(xi, eta)  # (4, 2)
        J = np.einsum("ekx,kl->exl", coords, dN)  # d x / d xi
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        inv = np.empty_like(J)
        inv[:, 0, 0] = J[:, 1, 1]
        inv[:, 0, 1] = -J[:, 0, 1]
        inv[:, 1, 0] = -J[:, 1, 0]
        inv[:, 1, 1] = J[:, 0, 0]
        inv /= det[:, None, None]
        # grad_x N_k = inv^T . dN_k
        grad = np.einsum("elx,kl->ekx", inv, dN)  # (ne, 4, 2)
        wdet = w * det
        # alpha . grad
        ag_x = a11[:, g, None] * grad[:, :, 0] + a12[:, g, None] * grad[:, :, 1]
        ag_y = a12[:, g, None] * grad[:, :, 0] + a22[:, g, None] * grad[:, :, 1]
        Ke += wdet[:, None, None] * (
            grad[:, :, 0, None] * ag_x[:, None, :]
            + grad[:, :, 1, None] * ag_y[:, None, :]
            + beta[:, g, None, None] * np.multiply.outer(N, N)
        )
        Me += (wdet * rho[:, g])[:, None, None] * np.multiply.outer(N, N)
        be += (wdet * f[:, g])[:, None] * N
    return Ke, Me, be
