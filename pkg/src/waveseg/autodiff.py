"""Minimal dense tensor engine with reverse-mode differentiation.

Tensors wrap contiguous float64 numpy arrays (rank <= 4 in practice) and
record a tape of parent links + backward closures while ``requires_grad``
propagates.  ``Tensor.backward()`` walks the tape once in reverse
topological order; gradients accumulate across repeated calls.
"""

import numpy as np
from scipy import special

from . import counter
from .errors import ContractError, DimensionError, NumericError


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad=False):
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._parents = ()
        self._backward_fn = None

    # -- basic introspection -------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    @property
    def ndim(self):
        return self.data.ndim

    def item(self):
        return float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def detach(self):
        """Constant copy of this value, cut off from the tape."""
        return Tensor(self.data.copy())

    def zero_grad(self):
        self.grad = None

    # -- autodiff ------------------------------------------------------------

    def backward(self):
        if self.data.size != 1:
            raise ContractError(
                f"backward requires a scalar loss, got shape {self.data.shape}"
            )
        topo = _toposort(self)
        grads = {id(self): np.ones_like(self.data)}
        for t in reversed(topo):
            g = grads.pop(id(t), None)
            if g is None:
                continue
            if t.requires_grad:
                t.grad = g.copy() if t.grad is None else t.grad + g
            if t._backward_fn is None:
                continue
            for p, pg in zip(t._parents, t._backward_fn(g)):
                if pg is None or not p.requires_grad:
                    continue
                key = id(p)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg

    # -- operator sugar ------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(as_tensor(other), self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return getitem(self, idx)

    def reshape(self, *shape):
        return reshape(self, *shape)

    def transpose(self, *axes):
        return transpose(self, *axes)

    @property
    def T(self):
        return transpose(self)

    def sum(self, axis=None, keepdims=False):
        return reduce_sum(self, axis, keepdims)

    def mean(self, axis=None, keepdims=False):
        return reduce_mean(self, axis, keepdims)


class Parameter:
    """Named trainable tensor."""

    __slots__ = ("name", "tensor")

    def __init__(self, name, data):
        self.name = name
        self.tensor = Tensor(data, requires_grad=True)

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.tensor.shape})"


def as_tensor(x):
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=np.float64))


def _toposort(root):
    order, visited = [], set()
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in visited:
                stack.append((p, False))
    return order


def _make(data, parents, backward_fn, mul_adds=0):
    out = Tensor(data)
    out.requires_grad = any(p.requires_grad for p in parents)
    if out.requires_grad:
        out._parents = tuple(parents)
        out._backward_fn = backward_fn
    counter.record(mul_adds, sum(p.data.size for p in parents) + out.data.size)
    return out


def _unbroadcast(g, shape):
    """Sum gradient g down to the given operand shape."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


# -- elementwise arithmetic --------------------------------------------------


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = a.data + b.data

    def bwd(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return _make(out, (a, b), bwd, mul_adds=out.size)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = a.data - b.data

    def bwd(g):
        return _unbroadcast(g, a.data.shape), -_unbroadcast(g, b.data.shape)

    return _make(out, (a, b), bwd, mul_adds=out.size)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = a.data * b.data

    def bwd(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return _make(out, (a, b), bwd, mul_adds=out.size)


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = a.data / b.data

    def bwd(g):
        ga = _unbroadcast(g / b.data, a.data.shape)
        gb = _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape)
        return ga, gb

    return _make(out, (a, b), bwd, mul_adds=out.size)


def power(a, exponent):
    a = as_tensor(a)
    c = float(exponent)
    out = a.data**c

    def bwd(g):
        return (g * c * a.data ** (c - 1.0),)

    return _make(out, (a,), bwd, mul_adds=out.size)


def sqrt(a):
    return power(a, 0.5)


def exp(a):
    a = as_tensor(a)
    out = np.exp(a.data)

    def bwd(g):
        return (g * out,)

    return _make(out, (a,), bwd, mul_adds=out.size)


def log(a):
    a = as_tensor(a)
    out = np.log(a.data)

    def bwd(g):
        return (g / a.data,)

    return _make(out, (a,), bwd, mul_adds=out.size)


def tanh(a):
    a = as_tensor(a)
    out = np.tanh(a.data)

    def bwd(g):
        return (g * (1.0 - out * out),)

    return _make(out, (a,), bwd, mul_adds=out.size)


def relu(a):
    a = as_tensor(a)
    out = np.maximum(a.data, 0.0)

    def bwd(g):
        return (g * (a.data > 0.0),)

    return _make(out, (a,), bwd, mul_adds=out.size)


_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


def gelu(a):
    """Exact (erf-based) GELU."""
    a = as_tensor(a)
    cdf = 0.5 * (1.0 + special.erf(a.data * _INV_SQRT2))
    out = a.data * cdf

    def bwd(g):
        pdf = np.exp(-0.5 * a.data * a.data) * _INV_SQRT2PI
        return (g * (cdf + a.data * pdf),)

    return _make(out, (a,), bwd, mul_adds=out.size)


# -- shape manipulation ------------------------------------------------------


def reshape(a, *shape):
    a = as_tensor(a)
    if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
        shape = tuple(shape[0])
    out = a.data.reshape(shape)

    def bwd(g):
        return (g.reshape(a.data.shape),)

    return _make(out, (a,), bwd)


def transpose(a, *axes):
    a = as_tensor(a)
    if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
        axes = tuple(axes[0])
    if not axes:
        axes = tuple(reversed(range(a.data.ndim)))
    inverse = np.argsort(axes)
    out = np.ascontiguousarray(a.data.transpose(axes))

    def bwd(g):
        return (g.transpose(inverse),)

    return _make(out, (a,), bwd)


def getitem(a, idx):
    a = as_tensor(a)
    out = a.data[idx]

    def bwd(g):
        full = np.zeros_like(a.data)
        np.add.at(full, idx, g)
        return (full,)

    return _make(np.ascontiguousarray(out), (a,), bwd)


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    splits = np.cumsum([t.data.shape[axis] for t in tensors])[:-1]

    def bwd(g):
        return tuple(np.split(g, splits, axis=axis))

    return _make(out, tuple(tensors), bwd)


# -- reductions --------------------------------------------------------------


def reduce_sum(a, axis=None, keepdims=False):
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def bwd(g):
        g = np.asarray(g)
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.data.shape).copy(),)

    return _make(np.asarray(out), (a,), bwd, mul_adds=a.data.size)


def reduce_mean(a, axis=None, keepdims=False):
    a = as_tensor(a)
    n = a.data.size if axis is None else np.prod(
        [a.data.shape[ax] for ax in (axis if isinstance(axis, tuple) else (axis,))]
    )
    return mul(reduce_sum(a, axis, keepdims), 1.0 / float(n))


# -- linear algebra ----------------------------------------------------------


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise DimensionError(
            f"matmul expects rank-2 operands, got {a.data.shape} and {b.data.shape}"
        )
    if a.data.shape[1] != b.data.shape[0]:
        raise DimensionError(
            f"matmul inner extents differ: {a.data.shape} vs {b.data.shape}"
        )
    out = a.data @ b.data
    flops = a.data.shape[0] * a.data.shape[1] * b.data.shape[1]

    def bwd(g):
        return g @ b.data.T, a.data.T @ g

    return _make(out, (a, b), bwd, mul_adds=flops)


def softmax_rows(a):
    """Numerically stable softmax over the last axis."""
    a = as_tensor(a)
    if not np.isfinite(a.data).all():
        raise NumericError("softmax_rows received non-finite input")
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=-1, keepdims=True)

    def bwd(g):
        dot = (g * out).sum(axis=-1, keepdims=True)
        return (out * (g - dot),)

    # max-subtract, exp, sum, normalize: four elementwise passes
    return _make(out, (a,), bwd, mul_adds=4 * out.size)


def conv2d(x, k, stride=1, pad=0, dilation=1):
    """2D cross-correlation over NCHW input with OIHW kernel."""
    from . import convbackend

    x, k = as_tensor(x), as_tensor(k)
    if x.data.ndim != 4 or k.data.ndim != 4:
        raise DimensionError(
            f"conv2d expects NCHW input and OIHW kernel, got {x.data.shape} and {k.data.shape}"
        )
    n, c, h, w = x.data.shape
    co, ci, kh, kw = k.data.shape
    if ci != c:
        raise DimensionError(
            f"conv2d channel mismatch: input {x.data.shape} vs kernel {k.data.shape}"
        )
    eff_kh = (kh - 1) * dilation + 1
    eff_kw = (kw - 1) * dilation + 1
    if eff_kh > h + 2 * pad or eff_kw > w + 2 * pad:
        raise DimensionError(
            f"kernel {k.data.shape} (dilation {dilation}) larger than padded input {x.data.shape}"
        )
    xp = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x.data
    out = convbackend.conv2d_forward(xp, k.data, stride, dilation)
    ho, wo = out.shape[2], out.shape[3]

    def bwd(g):
        g = np.ascontiguousarray(g)
        gxp = convbackend.conv2d_backward_input(g, k.data, xp.shape, stride, dilation)
        gk = convbackend.conv2d_backward_kernel(g, xp, k.data.shape, stride, dilation)
        gx = gxp[:, :, pad : pad + h, pad : pad + w] if pad else gxp
        return np.ascontiguousarray(gx), gk

    return _make(out, (x, k), bwd, mul_adds=n * co * ho * wo * c * kh * kw)


# -- interpolation -----------------------------------------------------------


def _interp_matrix(n_out, n_in, mode):
    """Row-stochastic 1D resampling matrix (align_corners=False convention)."""
    m = np.zeros((n_out, n_in))
    scale = n_in / n_out
    for i in range(n_out):
        src = (i + 0.5) * scale - 0.5
        if mode == "nearest":
            j = min(n_in - 1, max(0, int(round(src))))
            m[i, j] = 1.0
        else:
            lo = int(np.floor(src))
            frac = src - lo
            lo_c = min(n_in - 1, max(0, lo))
            hi_c = min(n_in - 1, max(0, lo + 1))
            m[i, lo_c] += 1.0 - frac
            m[i, hi_c] += frac
    return m


def resize2d(x, out_hw, mode="bilinear"):
    """Resize NCHW tensor spatially; differentiable (two matmuls)."""
    x = as_tensor(x)
    n, c, h, w = x.data.shape
    h2, w2 = out_hw
    if (h2, w2) == (h, w):
        return x
    ah = Tensor(_interp_matrix(h2, h, mode))
    aw = Tensor(_interp_matrix(w2, w, mode))
    # rows: [H2,H] @ [H, W*N*C]
    t = transpose(x, (2, 3, 0, 1)).reshape(h, w * n * c)
    t = matmul(ah, t).reshape(h2, w, n, c).transpose((1, 0, 2, 3)).reshape(w, h2 * n * c)
    t = matmul(aw, t).reshape(w2, h2, n, c).transpose((2, 3, 1, 0))
    return t
