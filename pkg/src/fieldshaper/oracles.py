"""Independent reference solutions used to check the FEM solver.

The 1D rod oracle is the step response of a rod with fixed value on the
left end and zero on the right, starting from zero: the steady profile
minus a sine eigenfunction series.  A finite-difference variant provides a
second, fully independent cross-check.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError

_SERIES_TOL = 1e-12
_N_MAX = 2_000_000


def rod_steady(L, alpha, beta, u_left, x):
    """Steady profile: linear for beta = 0, sinh decay otherwise."""
    x = np.asarray(x, dtype=float)
    if beta == 0:
        return u_left * (1 - x / L)
    lam = math.sqrt(beta / alpha)
    return u_left * np.sinh(lam * (L - x)) / math.sinh(lam * L)


def solve_rod_1d(L, alpha, rho, beta, u_left, t, x):
    """Step response u(x, t) of the rod with u(0)=u_left, u(L)=0, u(., 0)=0.

    Series coefficients are closed-form for any beta >= 0:
    c_n = -2 u_left k / (L (lambda^2 + k^2)) with k = n pi / L and
    lambda^2 = beta / alpha; each mode decays at (alpha k^2 + beta) / rho.
    Truncated once the next term bound drops below 1e-12.
    """
    if not (0 <= t) or L <= 0 or alpha <= 0 or rho <= 0 or beta < 0:
        raise ValidationError("invalid rod oracle arguments")
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-12) or np.any(x > L + 1e-12):
        raise ValidationError("x must lie in [0, L]")
    if t == 0:
        return np.where(np.abs(x) < 1e-300, float(u_left), 0.0)
    u = rod_steady(L, alpha, beta, u_left, x)
    lam2 = beta / alpha
    n = 1
    while n < _N_MAX:
        k = n * math.pi / L
        c = -2 * u_left * k / (L * (lam2 + k * k))
        decay = math.exp(-(alpha * k * k + beta) * t / rho)
        if abs(c) * decay < _SERIES_TOL:
            break
        u = u + c * decay * np.sin(k * x)
        n += 1
    return u


def solve_rod_1d_fd(L, alpha, rho, beta, u_left, t, x, nx=2000, dt=None):
    """Finite-difference oracle for the same rod problem (backward Euler).

    Independent of both the Fourier series and the FEM path; used for
    oracle-vs-oracle agreement checks.
    """
    x = np.asarray(x, dtype=float)
    h = L / nx
    if dt is None:
        dt = t / max(1, round(t / (0.5 * h)))  # dt ~ h/2 keeps time error small
    nsteps = max(1, round(t / dt))
    dt = t / nsteps
    grid = np.linspace(0, L, nx + 1)
    u = np.zeros(nx + 1)
    u[0] = u_left
    # implicit step: (rho/dt + beta + 2 alpha/h^2) u_i - alpha/h^2 (u_{i-1}+u_{i+1}) = rho/dt u_i^n
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    n_in = nx - 1
    main = np.full(n_in, rho / dt + beta + 2 * alpha / h**2)
    off = np.full(n_in - 1, -alpha / h**2)
    A = sp.diags([off, main, off], [-1, 0, 1]).tocsc()
    lu = spla.splu(A)
    for _ in range(nsteps):
        rhs = rho / dt * u[1:-1]
        rhs[0] += alpha / h**2 * u_left
        u[1:-1] = lu.solve(rhs)
    return np.interp(x, grid, u)
