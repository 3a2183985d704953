"""Orthonormal 2D Haar transform and its exact inverse.

Each 2x2 block [[a,b],[c,d]] maps to ll=(a+b+c+d)/2, lh=(a+b-c-d)/2,
hl=(a-b+c-d)/2, hh=(a-b-c+d)/2.  The 4x4 butterfly is Hadamard/2, which
is symmetric orthogonal, so the transform is its own inverse and the
gradient of each direction is the other direction applied to the
incoming gradient.
"""

from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, _make, as_tensor, concat
from .errors import DimensionError


def _dwt_concat_np(x):
    a = x[:, :, 0::2, 0::2]
    b = x[:, :, 0::2, 1::2]
    c = x[:, :, 1::2, 0::2]
    d = x[:, :, 1::2, 1::2]
    return np.concatenate(
        (
            0.5 * (a + b + c + d),
            0.5 * (a + b - c - d),
            0.5 * (a - b + c - d),
            0.5 * (a - b - c + d),
        ),
        axis=1,
    )


def _iwt_concat_np(y):
    n, c4, h2, w2 = y.shape
    c = c4 // 4
    ll, lh, hl, hh = y[:, :c], y[:, c : 2 * c], y[:, 2 * c : 3 * c], y[:, 3 * c :]
    out = np.empty((n, c, 2 * h2, 2 * w2))
    out[:, :, 0::2, 0::2] = 0.5 * (ll + lh + hl + hh)
    out[:, :, 0::2, 1::2] = 0.5 * (ll + lh - hl - hh)
    out[:, :, 1::2, 0::2] = 0.5 * (ll - lh + hl - hh)
    out[:, :, 1::2, 1::2] = 0.5 * (ll - lh - hl + hh)
    return out


@dataclass
class SubbandSet:
    """The four wavelet subbands of one decomposition level.

    ``orig_hw`` records the pre-padding spatial extents so that iwt2 can
    crop after reconstructing a reflection-padded odd input.
    """

    ll: Tensor
    lh: Tensor
    hl: Tensor
    hh: Tensor
    orig_hw: tuple | None = None

    @property
    def shape(self):
        return self.ll.shape


def _check_spatial(x):
    if x.data.ndim != 4:
        raise DimensionError(f"expected NCHW tensor, got shape {x.data.shape}")
    if x.data.shape[2] == 0 or x.data.shape[3] == 0:
        raise DimensionError(f"zero-sized spatial extent in shape {x.data.shape}")


def _pad_even(x):
    """Reflection-pad odd spatial extents up to even; returns (tensor, orig_hw)."""
    h, w = x.data.shape[2], x.data.shape[3]
    orig = (h, w)
    if h % 2:
        x = concat([x, x[:, :, h - 2 : h - 1, :]], axis=2)
    if w % 2:
        w_now = x.data.shape[3]
        x = concat([x, x[:, :, :, w_now - 2 : w_now - 1]], axis=3)
    return x, orig


def dwt_concat(x):
    """One Haar level with subbands stacked on the channel axis (ll,lh,hl,hh)."""
    x = as_tensor(x)
    _check_spatial(x)
    x, _ = _pad_even(x)
    out = _dwt_concat_np(x.data)

    def bwd(g):
        return (_iwt_concat_np(np.ascontiguousarray(g)),)

    return _make(out, (x,), bwd, mul_adds=out.size)


def iwt_concat(y):
    """Inverse of dwt_concat on a channel-stacked subband tensor."""
    y = as_tensor(y)
    if y.data.ndim != 4 or y.data.shape[1] % 4:
        raise DimensionError(
            f"iwt_concat expects 4*C channels in NCHW layout, got {y.data.shape}"
        )
    out = _iwt_concat_np(y.data)

    def bwd(g):
        return (_dwt_concat_np(np.ascontiguousarray(g)),)

    return _make(out, (y,), bwd, mul_adds=out.size)


def dwt2(x):
    """Decompose an NCHW tensor into its four subbands."""
    x = as_tensor(x)
    _check_spatial(x)
    orig = (x.data.shape[2], x.data.shape[3])
    y = dwt_concat(x)
    c = y.data.shape[1] // 4
    return SubbandSet(
        ll=y[:, :c],
        lh=y[:, c : 2 * c],
        hl=y[:, 2 * c : 3 * c],
        hh=y[:, 3 * c :],
        orig_hw=orig,
    )


def iwt2(s):
    """Exact inverse of dwt2 (crops any reflection padding)."""
    shapes = {t.data.shape for t in (s.ll, s.lh, s.hl, s.hh)}
    if len(shapes) != 1:
        raise DimensionError(f"inconsistent subband shapes: {sorted(shapes)}")
    out = iwt_concat(concat([s.ll, s.lh, s.hl, s.hh], axis=1))
    if s.orig_hw is not None:
        h, w = s.orig_hw
        if (h, w) != (out.data.shape[2], out.data.shape[3]):
            out = out[:, :, :h, :w]
    return out
