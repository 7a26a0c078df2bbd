"""Pure-Python finite-difference Ricci kernel (fallback backend).

Same contract as the compiled twin in _ricci_cy.pyx: the chart metric of
dt^2 + F^2 theta^2 + G^2 g_base is differentiated by second-order central
differences to Christoffel symbols and contracted to the Ricci tensor.
The t-dependence enters only through the 5-point profile stencils F5/G5
(values at t + k h, k = -2..2); the metric has no w-dependence, so
w-derivatives vanish identically.

Charts (chart id 0/1/2):
    0 flat       base du^2 + dv^2,               theta = dw - 2 s u dv
    1 hyperbolic base (du^2 + dv^2)/(4 v^2),     theta = dw + s/(2v) du
    2 spherical  base (du^2 + dv^2)/(1+u^2+v^2)^2,
                 theta = dw + s (u dv - v du)/(1 + u^2 + v^2)
All three give d theta = 2 s (base area form).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"


def metric_components(chart: int, s: float, F2: float, G2: float,
                      u: float, v: float) -> np.ndarray:
    g = np.zeros((4, 4))
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
    g[0, 0] = 1.0
    g[1, 1] = G2 * lam + F2 * au * au
    g[2, 2] = G2 * lam + F2 * av * av
    g[1, 2] = g[2, 1] = F2 * au * av
    g[1, 3] = g[3, 1] = F2 * au
    g[2, 3] = g[3, 2] = F2 * av
    g[3, 3] = F2
    return g


def _christoffel(chart, s, u, v, h, F5, G5, it, du, dv):
    """Gamma^k_ij at the stencil point shifted by (it, du, dv)."""

    def g_at(jt, eu, ev):
        i = it + jt + 2
        return metric_components(chart, s, F5[i] * F5[i], G5[i] * G5[i],
                                 u + du + eu, v + dv + ev)

    dg = np.zeros((4, 4, 4))
    dg[0] = (g_at(1, 0.0, 0.0) - g_at(-1, 0.0, 0.0)) / (2.0 * h)
    dg[1] = (g_at(0, h, 0.0) - g_at(0, -h, 0.0)) / (2.0 * h)
    dg[2] = (g_at(0, 0.0, h) - g_at(0, 0.0, -h)) / (2.0 * h)
    # dg[3] = 0: metric is w-independent
    ginv = np.linalg.inv(g_at(0, 0.0, 0.0))
    gam = np.einsum("kl,ilj->kij", ginv,
                    0.5 * (dg + np.einsum("jli->ilj", dg)
                           - np.einsum("lij->ilj", dg)))
    return gam


def christoffel_core(chart, s, u, v, h, F5, G5):
    """Christoffel symbols at the stencil center."""
    return _christoffel(chart, s, u, v, h, F5, G5, 0, 0.0, 0.0)


def ricci_core(chart, s, u, v, h, F5, G5):
    """(Ricci 4x4, metric 4x4) at the stencil center by pure FD."""
    gam = _christoffel(chart, s, u, v, h, F5, G5, 0, 0.0, 0.0)
    dgam = np.zeros((4, 4, 4, 4))
    dgam[0] = (_christoffel(chart, s, u, v, h, F5, G5, 1, 0.0, 0.0)
               - _christoffel(chart, s, u, v, h, F5, G5, -1, 0.0, 0.0)) / (2.0 * h)
    dgam[1] = (_christoffel(chart, s, u, v, h, F5, G5, 0, h, 0.0)
               - _christoffel(chart, s, u, v, h, F5, G5, 0, -h, 0.0)) / (2.0 * h)
    dgam[2] = (_christoffel(chart, s, u, v, h, F5, G5, 0, 0.0, h)
               - _christoffel(chart, s, u, v, h, F5, G5, 0, 0.0, -h)) / (2.0 * h)
    # dgam[3] = 0: no w-dependence
    ric = (np.einsum("kkij->ij", dgam)
           - np.einsum("ikkj->ij", dgam)
           + np.einsum("kkm,mij->ij", gam, gam)
           - np.einsum("kim,mkj->ij", gam, gam))
    g = metric_components(chart, s, F5[2] * F5[2], G5[2] * G5[2], u, v)
    return ric, g
