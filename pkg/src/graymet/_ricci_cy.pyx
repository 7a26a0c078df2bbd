# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled finite-difference Ricci kernel; see _ricci_py for the contract."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


cdef void _metric(int chart, double s, double F2, double G2,
                  double u, double v, double g[4][4]) noexcept nogil:
    cdef double lam, au, av, q
    cdef int i, j
    for i in range(4):
        for j in range(4):
            g[i][j] = 0.0
    if chart == 0:
        lam = 1.0
        au = 0.0
        av = -2.0 * s * u
    elif chart == 1:
        lam = 1.0 / (4.0 * v * v)
        au = s / (2.0 * v)
        av = 0.0
    else:
        q = 1.0 + u * u + v * v
        lam = 1.0 / (q * q)
        au = -s * v / q
        av = s * u / q
    g[0][0] = 1.0
    g[1][1] = G2 * lam + F2 * au * au
    g[2][2] = G2 * lam + F2 * av * av
    g[1][2] = F2 * au * av
    g[2][1] = g[1][2]
    g[1][3] = F2 * au
    g[3][1] = g[1][3]
    g[2][3] = F2 * av
    g[3][2] = g[2][3]
    g[3][3] = F2


cdef int _invert4(double a[4][4], double inv[4][4]) noexcept nogil:
    """Gauss-Jordan with partial pivoting; returns 0 on success."""
    cdef double work[4][8]
    cdef int i, j, k, piv
    cdef double big, tmp, factor
    for i in range(4):
        for j in range(4):
            work[i][j] = a[i][j]
            work[i][j + 4] = 1.0 if i == j else 0.0
    for i in range(4):
        piv = i
        big = work[i][i] if work[i][i] >= 0 else -work[i][i]
        for k in range(i + 1, 4):
            tmp = work[k][i] if work[k][i] >= 0 else -work[k][i]
            if tmp > big:
                big = tmp
                piv = k
        if big == 0.0:
            return 1
        if piv != i:
            for j in range(8):
                tmp = work[i][j]
                work[i][j] = work[piv][j]
                work[piv][j] = tmp
        factor = work[i][i]
        for j in range(8):
            work[i][j] /= factor
        for k in range(4):
            if k != i and work[k][i] != 0.0:
                factor = work[k][i]
                for j in range(8):
                    work[k][j] -= factor * work[i][j]
    for i in range(4):
        for j in range(4):
            inv[i][j] = work[i][j + 4]
    return 0


cdef void _christoffel(int chart, double s, double u, double v, double h,
                       double* F5, double* G5, int it, double du, double dv,
                       double gam[4][4][4]) noexcept nogil:
    cdef double gp[4][4]
    cdef double gm[4][4]
    cdef double g0[4][4]
    cdef double ginv[4][4]
    cdef double dg[4][4][4]
    cdef int a, i, j, k, l
    cdef double acc
    cdef int ic

    for a in range(4):
        for i in range(4):
            for j in range(4):
                dg[a][i][j] = 0.0

    ic = it + 2
    _metric(chart, s, F5[ic + 1] * F5[ic + 1], G5[ic + 1] * G5[ic + 1],
            u + du, v + dv, gp)
    _metric(chart, s, F5[ic - 1] * F5[ic - 1], G5[ic - 1] * G5[ic - 1],
            u + du, v + dv, gm)
    for i in range(4):
        for j in range(4):
            dg[0][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h)
    _metric(chart, s, F5[ic] * F5[ic], G5[ic] * G5[ic], u + du + h, v + dv, gp)
    _metric(chart, s, F5[ic] * F5[ic], G5[ic] * G5[ic], u + du - h, v + dv, gm)
    for i in range(4):
        for j in range(4):
            dg[1][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h)
    _metric(chart, s, F5[ic] * F5[ic], G5[ic] * G5[ic], u + du, v + dv + h, gp)
    _metric(chart, s, F5[ic] * F5[ic], G5[ic] * G5[ic], u + du, v + dv - h, gm)
    for i in range(4):
        for j in range(4):
            dg[2][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h)
    # dg[3] = 0: metric is w-independent

    _metric(chart, s, F5[ic] * F5[ic], G5[ic] * G5[ic], u + du, v + dv, g0)
    _invert4(g0, ginv)
    for k in range(4):
        for i in range(4):
            for j in range(4):
                acc = 0.0
                for l in range(4):
                    acc += ginv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j])
                gam[k][i][j] = 0.5 * acc


def christoffel_core(int chart, double s, double u, double v, double h,
                     double[::1] F5, double[::1] G5):
    cdef double gam[4][4][4]
    _christoffel(chart, s, u, v, h, &F5[0], &G5[0], 0, 0.0, 0.0, gam)
    out = np.empty((4, 4, 4))
    cdef double[:, :, ::1] mv = out
    cdef int k, i, j
    for k in range(4):
        for i in range(4):
            for j in range(4):
                mv[k][i][j] = gam[k][i][j]
    return out


def ricci_core(int chart, double s, double u, double v, double h,
               double[::1] F5, double[::1] G5):
    cdef double gam[4][4][4]
    cdef double gp[4][4][4]
    cdef double gm[4][4][4]
    cdef double dgam[4][4][4][4]
    cdef double ric[4][4]
    cdef double g[4][4]
    cdef int a, i, j, k, m2
    cdef double acc

    _christoffel(chart, s, u, v, h, &F5[0], &G5[0], 0, 0.0, 0.0, gam)
    for a in range(4):
        for k in range(4):
            for i in range(4):
                for j in range(4):
                    dgam[a][k][i][j] = 0.0
    _christoffel(chart, s, u, v, h, &F5[0], &G5[0], 1, 0.0, 0.0, gp)
    _christoffel(chart, s, u, v, h, &F5[0], &G5[0], -1, 0.0, 0.0, gm)
    for k in range(4):
        for i in range(4):
            for j in range(4):
                dgam[0][k][i][j] = (gp[k][i][j] - gm[k][i][j]) / (2.0 * h)
    _christoffel(chart, s, u, v, h, &F5[0], &G5[0], 0, h, 0.0, gp)
    _christoffel(chart, s, u, v, h, &F5[0], &G5[0], 0, -h, 0.0, gm)
    for k in range(4):
        for i in range(4):
            for j in range(4):
                dgam[1][k][i][j] = (gp[k][i][j] - gm[k][i][j]) / (2.0 * h)
    _christoffel(chart, s, u, v, h, &F5[0], &G5[0], 0, 0.0, h, gp)
    _christoffel(chart, s, u, v, h, &F5[0], &G5[0], 0, 0.0, -h, gm)
    for k in range(4):
        for i in range(4):
            for j in range(4):
                dgam[2][k][i][j] = (gp[k][i][j] - gm[k][i][j]) / (2.0 * h)
    # dgam[3] = 0

    for i in range(4):
        for j in range(4):
            acc = 0.0
            for k in range(4):
                acc += dgam[k][k][i][j] - dgam[i][k][k][j]
                for m2 in range(4):
                    acc += gam[k][k][m2] * gam[m2][i][j] - gam[k][i][m2] * gam[m2][k][j]
            ric[i][j] = acc

    _metric(chart, s, F5[2] * F5[2], G5[2] * G5[2], u, v, g)
    ric_out = np.empty((4, 4))
    g_out = np.empty((4, 4))
    cdef double[:, ::1] rv = ric_out
    cdef double[:, ::1] gv = g_out
    for i in range(4):
        for j in range(4):
            rv[i][j] = ric[i][j]
            gv[i][j] = g[i][j]
    return ric_out, g_out


def metric_components(int chart, double s, double F2, double G2,
                      double u, double v):
    cdef double g[4][4]
    _metric(chart, s, F2, G2, u, v, g)
    out = np.empty((4, 4))
    cdef double[:, ::1] mv = out
    cdef int i, j
    for i in range(4):
        for j in range(4):
            mv[i][j] = g[i][j]
    return out
