# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex-projection kernels.

Same four algorithms as ``kernels_py`` with typed sequential loops; the
partition steps are stable so the pivot sequences match the NumPy versions.
Selected automatically by ``hadopt.projection`` when the extension is built.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def sort_project(double[::1] y):
    cdef Py_ssize_t n = y.shape[0]
    u_arr = np.ascontiguousarray(np.sort(np.asarray(y))[::-1])
    cdef double[::1] u = u_arr
    cdef double css = 0.0, best = 0.0, tau
    cdef Py_ssize_t j, rho = 0
    for j in range(n):
        css += u[j]
        if u[j] - (css - 1.0) / (j + 1) > 0.0:
            rho = j
            best = css
    tau = (best - 1.0) / (rho + 1)
    return _clip_shift(y, tau)


def pivot_project(double[::1] y):
    cdef Py_ssize_t n = y.shape[0]
    idx_arr = np.arange(n, dtype=np.intp)
    scratch_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef Py_ssize_t[::1] scratch = scratch_arr
    cdef Py_ssize_t m = n, k, j, t, ng, nl, rho = 0
    cdef double vk, ds, s = 0.0
    while m > 0:
        k = idx[0]
        vk = y[k]
        ds = vk
        ng = 0
        nl = 0
        for t in range(m):
            j = idx[t]
            if y[j] >= vk:
                if j != k:
                    ds += y[j]
                    scratch[ng] = j
                    ng += 1
            else:
                idx[nl] = j
                nl += 1
        if s + ds - (rho + ng + 1) * vk < 1.0:
            s += ds
            rho += ng + 1
            m = nl
        else:
            for t in range(ng):
                idx[t] = scratch[t]
            m = ng
    return _clip_shift(y, (s - 1.0) / rho)


def duchi_project(double[::1] y):
    cdef Py_ssize_t n = y.shape[0]
    idx_arr = np.arange(n, dtype=np.intp)
    scratch_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef Py_ssize_t[::1] scratch = scratch_arr
    cdef Py_ssize_t m = n, k, j, t, ng, nl, rho = 0
    cdef double vk, ds, s = 0.0
    while m > 0:
        k = idx[0]
        vk = y[k]
        ds = 0.0
        ng = 0
        nl = 0
        for t in range(m):
            j = idx[t]
            if y[j] >= vk:
                ds += y[j]
                scratch[ng] = j
                ng += 1
            else:
                idx[nl] = j
                nl += 1
        if s + ds - (rho + ng) * vk < 1.0:
            s += ds
            rho += ng
            m = nl
        else:
            nl = 0
            for t in range(ng):
                if scratch[t] != k:
                    idx[nl] = scratch[t]
                    nl += 1
            m = nl
    return _clip_shift(y, (s - 1.0) / rho)


def condat_project(double[::1] y):
    cdef Py_ssize_t n = y.shape[0]
    v_arr = np.empty(n, dtype=np.float64)
    w_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef double[::1] wait = w_arr
    cdef Py_ssize_t nv = 1, nw = 0, k, i
    cdef double rho = y[0] - 1.0, yk, w
    cdef bint changed
    v[0] = y[0]
    for k in range(1, n):
        yk = y[k]
        if yk > rho:
            rho += (yk - rho) / (nv + 1)
            if rho > yk - 1.0:
                v[nv] = yk
                nv += 1
            else:
                for i in range(nv):
                    wait[nw + i] = v[i]
                nw += nv
                v[0] = yk
                nv = 1
                rho = yk - 1.0
    for i in range(nw):
        w = wait[i]
        if w > rho:
            v[nv] = w
            nv += 1
            rho += (w - rho) / nv
    changed = True
    while changed:
        changed = False
        i = 0
        while i < nv:
            w = v[i]
            if w <= rho:
                nv -= 1
                v[i] = v[nv]
                rho += (rho - w) / nv
                changed = True
            else:
                i += 1
    return _clip_shift(y, rho)


cdef _clip_shift(double[::1] y, double tau):
    cdef Py_ssize_t n = y.shape[0], i
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double xi
    for i in range(n):
        xi = y[i] - tau
        out[i] = xi if xi > 0.0 else 0.0
    return out_arr
