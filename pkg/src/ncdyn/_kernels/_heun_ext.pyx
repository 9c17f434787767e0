# cython: language_level=3
"""Compiled memory-kernel stepper; mirrors ``_heun_py.heun_memory``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, isfinite

cnp.import_array()


def heun_memory(double omega0, omegas, g2, occ, double n0, double dt,
                Py_ssize_t n_steps, double neg_tol=-1e-9):
    cdef double[::1] om = np.ascontiguousarray(omegas, dtype=np.float64)
    cdef double[::1] gg = np.ascontiguousarray(g2, dtype=np.float64)
    cdef double[::1] nk = np.ascontiguousarray(occ, dtype=np.float64)
    cdef Py_ssize_t K = om.shape[0]

    n_arr = np.empty(n_steps + 1)
    nd_arr = np.empty(n_steps + 1)
    dw_arr = np.empty(n_steps + 1)
    th_arr = np.empty(n_steps + 1)
    cdef double[::1] n_out = n_arr
    cdef double[::1] nd_out = nd_arr
    cdef double[::1] dw_out = dw_arr
    cdef double[::1] th_out = th_arr

    cdef double[::1] br = np.cos(np.asarray(om) * dt)
    cdef double[::1] bi = -np.sin(np.asarray(om) * dt)
    cdef double[::1] mr = np.zeros(K)
    cdef double[::1] mi = np.zeros(K)
    cdef double[::1] ur = np.zeros(K)
    cdef double[::1] ui = np.zeros(K)
    cdef double[::1] cr = np.empty(K)
    cdef double[::1] ci = np.empty(K)

    cdef double n = n0, dw = 0.0, theta = 0.0, ndot = 0.0
    cdef double half = 0.5 * dt
    cdef double w, sr, si, pr, pi, x, n_pred, n_new, acc, acc_w, ndot_pred, tr, ti
    cdef Py_ssize_t j, k

    n_out[0] = n
    nd_out[0] = ndot
    dw_out[0] = dw
    th_out[0] = theta
    for j in range(n_steps):
        w = omega0 + dw
        sr = cos(w * dt)
        si = sin(w * dt)
        n_pred = n + dt * ndot
        acc = 0.0
        for k in range(K):
            pr = sr * br[k] - si * bi[k]
            pi = sr * bi[k] + si * br[k]
            x = n - nk[k]
            tr = pr * mr[k] - pi * mi[k] + half * x * pr
            ti = pr * mi[k] + pi * mr[k] + half * x * pi
            cr[k] = tr
            ci[k] = ti
            acc += gg[k] * (tr + half * (n_pred - nk[k]))
        ndot_pred = -2.0 * acc
        n_new = n + half * (ndot + ndot_pred)
        acc = 0.0
        acc_w = 0.0
        for k in range(K):
            mr[k] = cr[k] + half * (n_new - nk[k])
            mi[k] = ci[k]
            pr = sr * br[k] - si * bi[k]
            pi = sr * bi[k] + si * br[k]
            tr = pr * ur[k] - pi * ui[k] + half * (pr + 1.0)
            ti = pr * ui[k] + pi * ur[k] + half * pi
            ur[k] = tr
            ui[k] = ti
            acc += gg[k] * mr[k]
            acc_w += gg[k] * ti
        ndot = -2.0 * acc
        dw = acc_w
        theta += w * dt
        n = n_new

        n_out[j + 1] = n
        nd_out[j + 1] = ndot
        dw_out[j + 1] = dw
        th_out[j + 1] = theta
        if not (isfinite(n) and isfinite(ndot) and isfinite(dw)):
            return n_arr, nd_arr, dw_arr, th_arr, 2, j + 1
        if n < neg_tol:
            return n_arr, nd_arr, dw_arr, th_arr, 1, j + 1
    return n_arr, nd_arr, dw_arr, th_arr, 0, -1
