# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled element matrix kernel; mirrors _kernels_py.element_matrices."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def element_matrices(double[:, :, ::1] coords,
                     double[:, ::1] rho, double[:, ::1] a11, double[:, ::1] a12,
                     double[:, ::1] a22, double[:, ::1] beta, double[:, ::1] f,
                     double[:, ::1] qpts, double[::1] qwts):
    cdef Py_ssize_t ne = coords.shape[0]
    cdef Py_ssize_t nq = qpts.shape[0]
    Ke_arr = np.zeros((ne, 4, 4))
    Me_arr = np.zeros((ne, 4, 4))
    be_arr = np.zeros((ne, 4))
    cdef double[:, :, ::1] Ke = Ke_arr
    cdef double[:, :, ::1] Me = Me_arr
    cdef double[:, ::1] be = be_arr

    cdef Py_ssize_t e, g, i, j
    cdef double xi, eta, det, wdet
    cdef double N[4]
    cdef double dNxi[4]
    cdef double dNeta[4]
    cdef double gx[4]
    cdef double gy[4]
    cdef double j00, j01, j10, j11, i00, i01, i10, i11
    cdef double agx, agy, b, r, src

    for e in range(ne):
        for g in range(nq):
            xi = qpts[g, 0]
            eta = qpts[g, 1]
            N[0] = 0.25 * (1 - xi) * (1 - eta)
            N[1] = 0.25 * (1 + xi) * (1 - eta)
            N[2] = 0.25 * (1 + xi) * (1 + eta)
            N[3] = 0.25 * (1 - xi) * (1 + eta)
            dNxi[0] = -0.25 * (1 - eta); dNeta[0] = -0.25 * (1 - xi)
            dNxi[1] = 0.25 * (1 - eta);  dNeta[1] = -0.25 * (1 + xi)
            dNxi[2] = 0.25 * (1 + eta);  dNeta[2] = 0.25 * (1 + xi)
            dNxi[3] = -0.25 * (1 + eta); dNeta[3] = 0.25 * (1 - xi)

            j00 = 0; j01 = 0; j10 = 0; j11 = 0
            for i in range(4):
                j00 += coords[e, i, 0] * dNxi[i]
                j01 += coords[e, i, 0] * dNeta[i]
                j10 += coords[e, i, 1] * dNxi[i]
                j11 += coords[e, i, 1] * dNeta[i]
            det = j00 * j11 - j01 * j10
            i00 = j11 / det; i01 = -j01 / det
            i10 = -j10 / det; i11 = j00 / det
            for i in range(4):
                gx[i] = i00 * dNxi[i] + i10 * dNeta[i]
                gy[i] = i01 * dNxi[i] + i11 * dNeta[i]

            wdet = qwts[g] * det
            b = beta[e, g]
            r = rho[e, g]
            src = f[e, g]
            for i in range(4):
                agx = a11[e, g] * gx[i] + a12[e, g] * gy[i]
                agy = a12[e, g] * gx[i] + a22[e, g] * gy[i]
                for j in range(4):
                    Ke[e, i, j] += wdet * (gx[j] * agx + gy[j] * agy + b * N[i] * N[j])
                    Me[e, i, j] += wdet * r * N[i] * N[j]
                be[e, i] += wdet * src * N[i]
    return Ke_arr, Me_arr, be_arr
