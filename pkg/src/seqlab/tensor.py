"""Dense tensors with reverse-mode automatic differentiation.

Values are stored as contiguous float64 numpy arrays (the test tolerances
assume 64-bit). Every operation records its inputs and a gradient closure;
``Tensor.backward()`` walks the recorded graph in reverse topological order
and accumulates d(loss)/d(x) into ``x.grad`` for every tensor that has
``requires_grad`` set. A graph lives for one forward/backward pass and is
dropped with its tensors afterwards.

Broadcasting follows numpy; gradients of broadcast operands are summed back
down to the operand's shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


class Tensor:
    """A dense real-valued array, optionally participating in the tape."""

    __slots__ = ("data", "requires_grad", "grad", "_parents")

    def __init__(self, data, requires_grad: bool = False, _parents=()):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad) or any(
            p.requires_grad for p, _ in _parents
        )
        self.grad: np.ndarray | None = None
        self._parents = _parents

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # -- operators ---------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, neg(_as_tensor(other)))

    def __rsub__(self, other):
        return add(_as_tensor(other), neg(self))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def sum(self):
        return tensor_sum(self)

    def reshape(self, shape):
        return reshape(self, shape)

    def backward(self):
        backward(self)


def _as_tensor(x) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(x)


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum a gradient down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# -- elementwise ops --------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data + b.data
    parents = (
        (a, lambda g: _unbroadcast(g, a.data.shape)),
        (b, lambda g: _unbroadcast(g, b.data.shape)),
    )
    return Tensor(out_data, _parents=parents)


def neg(a) -> Tensor:
    a = _as_tensor(a)
    return Tensor(-a.data, _parents=((a, lambda g: -g),))


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    out_data = a.data * b.data
    parents = (
        (a, lambda g: _unbroadcast(g * b.data, a.data.shape)),
        (b, lambda g: _unbroadcast(g * a.data, b.data.shape)),
    )
    return Tensor(out_data, _parents=parents)


def tanh(a) -> Tensor:
    a = _as_tensor(a)
    t = np.tanh(a.data)
    return Tensor(t, _parents=((a, lambda g: g * (1.0 - t * t)),))


def sigmoid(a) -> Tensor:
    a = _as_tensor(a)
    # split form avoids overflow of exp for large |x|
    x = a.data
    s = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                 np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))
    return Tensor(s, _parents=((a, lambda g: g * s * (1.0 - s)),))


def relu(a) -> Tensor:
    a = _as_tensor(a)
    mask = a.data > 0
    return Tensor(np.where(mask, a.data, 0.0),
                  _parents=((a, lambda g: g * mask),))


# -- matrix product ---------------------------------------------------------


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(
            f"matmul: incompatible shapes {a.data.shape} x {b.data.shape}"
        )
    out = a.data @ b.data
    parents = (
        (a, lambda g: g @ b.data.T),
        (b, lambda g: a.data.T @ g),
    )
    return Tensor(out, _parents=parents)


# -- reductions -------------------------------------------------------------


def tensor_sum(a) -> Tensor:
    a = _as_tensor(a)
    out = np.asarray(a.data.sum())
    return Tensor(out, _parents=((a, lambda g: np.broadcast_to(g, a.data.shape).copy()),))


def max_over_axis(a, axis: int) -> Tensor:
    """Maximum along ``axis``; the gradient routes to the first argmax."""
    a = _as_tensor(a)
    if not -a.data.ndim <= axis < a.data.ndim:
        raise ShapeError(f"max_over_axis: axis {axis} invalid for shape {a.data.shape}")
    idx = np.argmax(a.data, axis=axis)
    out = np.take_along_axis(a.data, np.expand_dims(idx, axis), axis).squeeze(axis)

    def grad_fn(g):
        gx = np.zeros_like(a.data)
        np.put_along_axis(gx, np.expand_dims(idx, axis),
                          np.expand_dims(g, axis), axis)
        return gx

    return Tensor(out, _parents=((a, grad_fn),))


def logsumexp(a, axis: int | None = None) -> Tensor:
    """log(sum(exp(x))) with the max-subtraction trick; axis=None reduces all."""
    a = _as_tensor(a)
    x = a.data
    if axis is None:
        m = np.max(x)
        e = np.exp(x - m)
        s = e.sum()
        out = np.asarray(m + np.log(s))
        softmax = e / s
        return Tensor(out, _parents=((a, lambda g: g * softmax),))
    if not -x.ndim <= axis < x.ndim:
        raise ShapeError(f"logsumexp: axis {axis} invalid for shape {x.shape}")
    m = np.max(x, axis=axis, keepdims=True)
    e = np.exp(x - m)
    s = e.sum(axis=axis, keepdims=True)
    out = (m + np.log(s)).squeeze(axis)
    softmax = e / s

    def grad_fn(g):
        return np.expand_dims(g, axis) * softmax

    return Tensor(out, _parents=((a, grad_fn),))


# -- shape ops --------------------------------------------------------------


def concat(tensors, axis: int) -> Tensor:
    tensors = [_as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeError("concat: empty input")
    out = np.concatenate([t.data for t in tensors], axis=axis)
    extents = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + extents)

    def make_grad(i):
        lo, hi = offsets[i], offsets[i + 1]

        def grad_fn(g):
            index = [slice(None)] * g.ndim
            index[axis] = slice(lo, hi)
            return g[tuple(index)]

        return grad_fn

    parents = tuple((t, make_grad(i)) for i, t in enumerate(tensors))
    return Tensor(out, _parents=parents)


def narrow(a, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice of ``length`` entries along ``axis``."""
    a = _as_tensor(a)
    if start < 0 or start + length > a.data.shape[axis]:
        raise ShapeError(
            f"narrow: [{start}:{start + length}] out of range for axis {axis} "
            f"of shape {a.data.shape}"
        )
    index = [slice(None)] * a.data.ndim
    index[axis] = slice(start, start + length)
    index = tuple(index)
    out = a.data[index]

    def grad_fn(g):
        gx = np.zeros_like(a.data)
        gx[index] = g
        return gx

    return Tensor(out, _parents=((a, grad_fn),))


def reshape(a, shape) -> Tensor:
    a = _as_tensor(a)
    out = a.data.reshape(shape)
    return Tensor(out, _parents=((a, lambda g: g.reshape(a.data.shape)),))


def transpose(a) -> Tensor:
    a = _as_tensor(a)
    if a.data.ndim != 2:
        raise ShapeError(f"transpose: expected 2-D tensor, got {a.data.shape}")
    return Tensor(a.data.T, _parents=((a, lambda g: g.T),))


def gather_rows(a, indices) -> Tensor:
    """Rows ``indices`` of a 2-D tensor; gradients scatter-add back."""
    a = _as_tensor(a)
    if a.data.ndim != 2:
        raise ShapeError(f"gather_rows: expected 2-D tensor, got {a.data.shape}")
    idx = np.asarray(indices, dtype=np.intp)
    out = a.data[idx]

    def grad_fn(g):
        gx = np.zeros_like(a.data)
        np.add.at(gx, idx, g)
        return gx

    return Tensor(out, _parents=((a, grad_fn),))


def take_flat(a, flat_indices) -> Tensor:
    """1-D gather from the flattened tensor; used for path scoring."""
    a = _as_tensor(a)
    idx = np.asarray(flat_indices, dtype=np.intp)
    flat = a.data.reshape(-1)
    out = flat[idx]

    def grad_fn(g):
        gx = np.zeros(flat.shape, dtype=np.float64)
        np.add.at(gx, idx, g)
        return gx.reshape(a.data.shape)

    return Tensor(out, _parents=((a, grad_fn),))


# -- reverse pass -----------------------------------------------------------


def backward(loss: Tensor):
    """Accumulate d(loss)/d(x) into ``x.grad`` for every taped tensor.

    ``loss`` must hold exactly one element. Repeated calls accumulate into
    existing gradients; zero them between steps.
    """
    if loss.size != 1:
        raise ShapeError(f"backward: loss must be scalar, got shape {loss.shape}")

    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent, _ in node._parents:
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))

    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(topo):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node.requires_grad:
            if node.grad is None:
                node.grad = np.zeros_like(node.data)
            node.grad += g
        for parent, grad_fn in node._parents:
            if not parent.requires_grad:
                continue
            contribution = grad_fn(g)
            acc = grads.get(id(parent))
            if acc is None:
                # may alias g or a view of it; never mutate in place
                grads[id(parent)] = contribution
            else:
                grads[id(parent)] = acc + contribution


# -- gradient checking ------------------------------------------------------


@dataclass
class GradCheckReport:
    """Worst relative error per parameter plus bookkeeping for NaN hits."""

    per_param: list[float] = field(default_factory=list)
    nan_count: int = 0

    @property
    def max_error(self) -> float:
        return max(self.per_param) if self.per_param else 0.0


def check_gradients(f, params, h: float = 1e-5, floor: float = 1e-5) -> GradCheckReport:
    """Compare taped gradients of ``f()`` against central finite differences.

    ``f`` must be a deterministic scalar-valued function of ``params``
    (a list of requires_grad tensors). Relative error per coordinate is
    |fd - taped| / max(|fd|, |taped|, floor).

    ``floor`` bounds the denominator: central differences carry rounding
    noise of about eps * |f| / h (~1e-10 here), so coordinates whose
    gradients sit near that noise cannot be compared relatively at all.
    Below the floor the check still enforces |fd - taped| <= tol * floor
    in absolute terms, which stays well above the noise.
    """
    for p in params:
        p.zero_grad()
    loss = f()
    backward(loss)
    taped = [np.zeros_like(p.data) if p.grad is None else p.grad.copy()
             for p in params]

    report = GradCheckReport()
    for p, g in zip(params, taped):
        worst = 0.0
        flat = p.data.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            up = float(f().data)
            flat[i] = keep - h
            down = float(f().data)
            flat[i] = keep
            fd = (up - down) / (2.0 * h)
            if np.isnan(fd) or np.isnan(gflat[i]):
                report.nan_count += 1
                continue
            err = abs(fd - gflat[i]) / max(abs(fd), abs(gflat[i]), floor)
            worst = max(worst, err)
        report.per_param.append(worst)
    return report
