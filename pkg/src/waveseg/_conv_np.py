"""Pure-numpy conv kernels (fallback backend).

Loops only over kernel offsets; each offset is one big strided
multiply-accumulate, so the cost stays in BLAS.  Inputs arrive already
padded; all arrays are float64 NCHW / OIHW.
"""

import numpy as np

NAME = "numpy"


def _out_extent(padded, keff, stride):
    return (padded - keff) // stride + 1


def conv2d_forward(xp, k, stride, dilation):
    n, c, hp, wp = xp.shape
    co, _, kh, kw = k.shape
    ho = _out_extent(hp, (kh - 1) * dilation + 1, stride)
    wo = _out_extent(wp, (kw - 1) * dilation + 1, stride)
    acc = np.zeros((n, ho, wo, co))
    for u in range(kh):
        for v in range(kw):
            xs = xp[
                :,
                :,
                u * dilation : u * dilation + ho * stride : stride,
                v * dilation : v * dilation + wo * stride : stride,
            ]
            acc += xs.transpose(0, 2, 3, 1) @ k[:, :, u, v].T
    return np.ascontiguousarray(acc.transpose(0, 3, 1, 2))


def conv2d_backward_input(g, k, xp_shape, stride, dilation):
    n, co, ho, wo = g.shape
    _, _, kh, kw = k.shape
    gxp = np.zeros(xp_shape)
    gt = g.transpose(0, 2, 3, 1)  # N,Ho,Wo,Co
    for u in range(kh):
        for v in range(kw):
            contrib = gt @ k[:, :, u, v]  # N,Ho,Wo,C
            gxp[
                :,
                :,
                u * dilation : u * dilation + ho * stride : stride,
                v * dilation : v * dilation + wo * stride : stride,
            ] += contrib.transpose(0, 3, 1, 2)
    return gxp


def conv2d_backward_kernel(g, xp, k_shape, stride, dilation):
    _, _, ho, wo = g.shape
    co, c, kh, kw = k_shape
    gk = np.zeros(k_shape)
    for u in range(kh):
        for v in range(kw):
            xs = xp[
                :,
                :,
                u * dilation : u * dilation + ho * stride : stride,
                v * dilation : v * dilation + wo * stride : stride,
            ]
            gk[:, :, u, v] = np.tensordot(g, xs, axes=([0, 2, 3], [0, 2, 3]))
    return gk
