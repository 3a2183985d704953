# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled conv kernels (hot loops of the CNN branch and 1x1 projections)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def conv2d_forward(double[:, :, :, ::1] xp, double[:, :, :, ::1] k,
                   Py_ssize_t stride, Py_ssize_t dilation):
    cdef Py_ssize_t n = xp.shape[0], c = xp.shape[1]
    cdef Py_ssize_t hp = xp.shape[2], wp = xp.shape[3]
    cdef Py_ssize_t co = k.shape[0], kh = k.shape[2], kw = k.shape[3]
    cdef Py_ssize_t ho = (hp - ((kh - 1) * dilation + 1)) // stride + 1
    cdef Py_ssize_t wo = (wp - ((kw - 1) * dilation + 1)) // stride + 1
    out_arr = np.zeros((n, co, ho, wo))
    cdef double[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t b, o, ci, i, j, u, v
    cdef double acc
    with nogil:
        for b in range(n):
            for o in range(co):
                for i in range(ho):
                    for j in range(wo):
                        acc = 0.0
                        for ci in range(c):
                            for u in range(kh):
                                for v in range(kw):
                                    acc = acc + xp[b, ci, i * stride + u * dilation,
                                                   j * stride + v * dilation] * k[o, ci, u, v]
                        out[b, o, i, j] = acc
    return out_arr


def conv2d_backward_input(double[:, :, :, ::1] g, double[:, :, :, ::1] k,
                          xp_shape, Py_ssize_t stride, Py_ssize_t dilation):
    cdef Py_ssize_t n = g.shape[0], co = g.shape[1]
    cdef Py_ssize_t ho = g.shape[2], wo = g.shape[3]
    cdef Py_ssize_t c = k.shape[1], kh = k.shape[2], kw = k.shape[3]
    gxp_arr = np.zeros(tuple(xp_shape))
    cdef double[:, :, :, ::1] gxp = gxp_arr
    cdef Py_ssize_t b, o, ci, i, j, u, v
    cdef double gv
    with nogil:
        for b in range(n):
            for o in range(co):
                for i in range(ho):
                    for j in range(wo):
                        gv = g[b, o, i, j]
                        for ci in range(c):
                            for u in range(kh):
                                for v in range(kw):
                                    gxp[b, ci, i * stride + u * dilation,
                                        j * stride + v * dilation] += gv * k[o, ci, u, v]
    return gxp_arr


def conv2d_backward_kernel(double[:, :, :, ::1] g, double[:, :, :, ::1] xp,
                           k_shape, Py_ssize_t stride, Py_ssize_t dilation):
    cdef Py_ssize_t n = g.shape[0], co = g.shape[1]
    cdef Py_ssize_t ho = g.shape[2], wo = g.shape[3]
    cdef Py_ssize_t c = k_shape[1], kh = k_shape[2], kw = k_shape[3]
    gk_arr = np.zeros(tuple(k_shape))
    cdef double[:, :, :, ::1] gk = gk_arr
    cdef Py_ssize_t b, o, ci, i, j, u, v
    cdef double gv
    with nogil:
        for b in range(n):
            for o in range(co):
                for i in range(ho):
                    for j in range(wo):
                        gv = g[b, o, i, j]
                        for ci in range(c):
                            for u in range(kh):
                                for v in range(kw):
                                    gk[o, ci, u, v] += gv * xp[b, ci, i * stride + u * dilation,
                                                               j * stride + v * dilation]
    return gk_arr
