# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched information-term kernels.

Same contract as ``_pykernels``: one output row per candidate, in bits.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2

cnp.import_array()

cdef double ZERO_MASS = 1e-15


cdef inline double nplogp(double p) nogil:
    if p > ZERO_MASS:
        return -p * log2(p)
    return 0.0


def cutset_terms(px_in, pt_in, kernel_in):
    cdef const double[:, ::1] px = np.ascontiguousarray(px_in, dtype=np.float64)
    cdef const double[::1] pt = np.ascontiguousarray(pt_in, dtype=np.float64)
    cdef const double[:, :, ::1] k = np.ascontiguousarray(kernel_in, dtype=np.float64)
    cdef Py_ssize_t nb = px.shape[0], nx = k.shape[0], nt = k.shape[1], ny = k.shape[2]
    cdef Py_ssize_t b, x, t, y
    cdef double[:, ::1] out = np.empty((nb, 2))
    cdef double[::1] hx = np.zeros(nx)      # H(Y|X=x)
    cdef double[::1] hxt = np.zeros(nx)     # sum_t p(t) H(Y|X=x,T=t)
    cdef double[::1] py = np.empty(ny)
    cdef double[::1] pyt = np.empty(ny)
    cdef double s, h_y, h_yx, h_yt, h_yxt

    for x in range(nx):
        for y in range(ny):
            s = 0.0
            for t in range(nt):
                s += pt[t] * k[x, t, y]
            hx[x] += nplogp(s)
        for t in range(nt):
            s = 0.0
            for y in range(ny):
                s += nplogp(k[x, t, y])
            hxt[x] += pt[t] * s

    with nogil:
        for b in range(nb):
            h_yx = 0.0
            h_yxt = 0.0
            for x in range(nx):
                h_yx += px[b, x] * hx[x]
                h_yxt += px[b, x] * hxt[x]
            for y in range(ny):
                py[y] = 0.0
            h_yt = 0.0
            for t in range(nt):
                for y in range(ny):
                    s = 0.0
                    for x in range(nx):
                        s += px[b, x] * k[x, t, y]
                    pyt[y] = s
                    py[y] += pt[t] * s
                s = 0.0
                for y in range(ny):
                    s += nplogp(pyt[y])
                h_yt += pt[t] * s
            h_y = 0.0
            for y in range(ny):
                h_y += nplogp(py[y])
            out[b, 0] = h_y - h_yx
            out[b, 1] = h_yt - h_yxt
    return np.asarray(out)


def relay_terms(px_in, pt_in, kernel_in, q_in):
    cdef const double[:, ::1] px = np.ascontiguousarray(px_in, dtype=np.float64)
    cdef const double[::1] pt = np.ascontiguousarray(pt_in, dtype=np.float64)
    cdef const double[:, :, ::1] k = np.ascontiguousarray(kernel_in, dtype=np.float64)
    cdef const double[:, :, ::1] q = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef Py_ssize_t nb = px.shape[0], nx = k.shape[0], nt = k.shape[1], ny = k.shape[2]
    cdef Py_ssize_t nv = q.shape[2]
    cdef Py_ssize_t b, x, t, v, y
    cdef double[:, ::1] out = np.empty((nb, 7))
    cdef double[::1] hx = np.zeros(nx)
    cdef double[::1] hxt = np.zeros(nx)
    cdef double[::1] pv = np.empty(nv)
    cdef double[::1] py = np.empty(ny)
    cdef double[:, ::1] ptv = np.empty((nt, nv))
    cdef double[:, ::1] pyt = np.empty((nt, ny))
    cdef double[:, ::1] pvy = np.empty((nv, ny))
    cdef double s, p, h_t, h_x, h_v, h_tv, h_ty, h_y, h_tvy, h_vy, h_xvy
    cdef double h_yx, h_yxt, h_y_xv

    h_t = 0.0
    for t in range(nt):
        h_t += nplogp(pt[t])
    for x in range(nx):
        for y in range(ny):
            s = 0.0
            for t in range(nt):
                s += pt[t] * k[x, t, y]
            hx[x] += nplogp(s)
        for t in range(nt):
            s = 0.0
            for y in range(ny):
                s += nplogp(k[x, t, y])
            hxt[x] += pt[t] * s

    with nogil:
        for b in range(nb):
            h_x = 0.0
            h_yx = 0.0
            h_yxt = 0.0
            for x in range(nx):
                h_x += nplogp(px[b, x])
                h_yx += px[b, x] * hx[x]
                h_yxt += px[b, x] * hxt[x]

            h_tv = 0.0
            for v in range(nv):
                pv[v] = 0.0
            for t in range(nt):
                for v in range(nv):
                    p = pt[t] * q[b, t, v]
                    ptv[t, v] = p
                    pv[v] += p
                    h_tv += nplogp(p)
            h_v = 0.0
            for v in range(nv):
                h_v += nplogp(pv[v])

            h_ty = 0.0
            for y in range(ny):
                py[y] = 0.0
            for t in range(nt):
                for y in range(ny):
                    s = 0.0
                    for x in range(nx):
                        s += px[b, x] * k[x, t, y]
                    pyt[t, y] = s
                    p = pt[t] * s
                    py[y] += p
                    h_ty += nplogp(p)
            h_y = 0.0
            for y in range(ny):
                h_y += nplogp(py[y])

            h_tvy = 0.0
            for v in range(nv):
                for y in range(ny):
                    pvy[v, y] = 0.0
            for t in range(nt):
                for v in range(nv):
                    for y in range(ny):
                        p = ptv[t, v] * pyt[t, y]
                        pvy[v, y] += p
                        h_tvy += nplogp(p)
            h_vy = 0.0
            for v in range(nv):
                for y in range(ny):
                    h_vy += nplogp(pvy[v, y])

            h_xvy = 0.0
            for x in range(nx):
                if px[b, x] <= 0.0:
                    continue
                for v in range(nv):
                    for y in range(ny):
                        s = 0.0
                        for t in range(nt):
                            s += ptv[t, v] * k[x, t, y]
                        h_xvy += nplogp(px[b, x] * s)
            h_y_xv = h_xvy - h_x - h_v

            out[b, 0] = h_y - h_y_xv
            out[b, 1] = (h_ty - h_t) - h_yxt
            out[b, 2] = h_y - h_yx
            out[b, 3] = (h_vy - h_v) - h_y_xv
            out[b, 4] = h_t + h_v - h_tv
            out[b, 5] = h_v + h_y - h_vy
            out[b, 6] = h_ty + h_vy - h_tvy - h_y
    return np.asarray(out)


def aux_terms(pt_in, w_in, q_in):
    cdef const double[::1] pt = np.ascontiguousarray(pt_in, dtype=np.float64)
    cdef const double[:, ::1] w = np.ascontiguousarray(w_in, dtype=np.float64)
    cdef const double[:, :, ::1] q = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef Py_ssize_t nb = q.shape[0], nt = q.shape[1], nv = q.shape[2], nu = w.shape[1]
    cdef Py_ssize_t b, t, v, u
    cdef double[:, ::1] out = np.empty((nb, 3))
    cdef double s, p, pv, h_t, h_v, h_tv, h_uv

    h_t = 0.0
    for t in range(nt):
        h_t += nplogp(pt[t])
    with nogil:
        for b in range(nb):
            h_v = 0.0
            h_tv = 0.0
            h_uv = 0.0
            for v in range(nv):
                pv = 0.0
                for t in range(nt):
                    p = pt[t] * q[b, t, v]
                    pv += p
                    h_tv += nplogp(p)
                h_v += nplogp(pv)
                for u in range(nu):
                    s = 0.0
                    for t in range(nt):
                        s += pt[t] * q[b, t, v] * w[t, u]
                    h_uv += nplogp(s)
            out[b, 0] = h_uv - h_v
            out[b, 1] = h_tv - h_v
            out[b, 2] = h_t - out[b, 1]
    return np.asarray(out)
