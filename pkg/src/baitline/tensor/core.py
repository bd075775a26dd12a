"""Dense float64 tensors with reverse-mode automatic differentiation.

Graphs are built eagerly by the op functions below; ``backward`` runs a
reverse topological sweep and accumulates gradients on every reachable node.
Any op that produces a NaN or Inf raises immediately, so numerical blowups
surface at their source instead of as garbage metrics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class NonFiniteError(ArithmeticError):
    """An operation produced NaN or Inf."""


def _ensure_finite(data: np.ndarray, op: str) -> None:
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f"{op} produced non-finite values")


class Tensor:
    """Graph node: value plus parents and a gradient propagation rule.

    ``backward_rule(grad_out)`` returns one gradient contribution per parent
    (None for parents that do not receive gradient).  Leaves have no parents;
    trainable parameters are just leaves the caller keeps references to.
    """

    __slots__ = ("data", "parents", "backward_rule", "grad")

    def __init__(
        self,
        data,
        parents: tuple["Tensor", ...] = (),
        backward_rule: Callable[[np.ndarray], tuple] | None = None,
        op: str = "leaf",
    ):
        arr = np.asarray(data, dtype=np.float64)
        _ensure_finite(arr, op)
        self.data = arr
        self.parents = parents
        self.backward_rule = backward_rule
        self.grad: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.shape})"

    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return multiply(self, _wrap(other))

    def __rmul__(self, other):
        return multiply(_wrap(other), self)

    def __matmul__(self, other):
        return matmul(self, _wrap(other))

    def __neg__(self):
        return multiply(self, Tensor(-1.0))


def _wrap(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcasted gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data + b.data

    def rule(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return Tensor(out_data, (a, b), rule, op="add")


def sub(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data - b.data

    def rule(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(-g, b.data.shape)

    return Tensor(out_data, (a, b), rule, op="sub")


def multiply(a: Tensor, b: Tensor) -> Tensor:
    out_data = a.data * b.data

    def rule(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return Tensor(out_data, (a, b), rule, op="multiply")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ValueError(f"matmul expects 2-D operands, got {a.shape} @ {b.shape}")
    out_data = a.data @ b.data

    def rule(g):
        return g @ b.data.T, a.data.T @ g

    return Tensor(out_data, (a, b), rule, op="matmul")


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise ValueError("concat of zero tensors")
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]

    def rule(g):
        pieces = np.split(g, np.cumsum(sizes)[:-1], axis=axis)
        return tuple(pieces)

    return Tensor(out_data, tuple(tensors), rule, op="concat")


def narrow(x: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice [start, start+length) along ``axis``."""
    index = [slice(None)] * x.data.ndim
    index[axis] = slice(start, start + length)
    index = tuple(index)
    out_data = x.data[index].copy()

    def rule(g):
        gx = np.zeros_like(x.data)
        gx[index] = g
        return (gx,)

    return Tensor(out_data, (x,), rule, op="narrow")


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    out_data = x.data.reshape(shape)

    def rule(g):
        return (g.reshape(x.data.shape),)

    return Tensor(out_data, (x,), rule, op="reshape")


def stack_steps(tensors: Sequence[Tensor]) -> Tensor:
    """Stack per-step (B, H) tensors into (B, T, H)."""
    out_data = np.stack([t.data for t in tensors], axis=1)

    def rule(g):
        return tuple(g[:, t, :] for t in range(len(tensors)))

    return Tensor(out_data, tuple(tensors), rule, op="stack_steps")


def tanh(x: Tensor) -> Tensor:
    out_data = np.tanh(x.data)

    def rule(g):
        return (g * (1.0 - out_data * out_data),)

    return Tensor(out_data, (x,), rule, op="tanh")


def sigmoid(x: Tensor) -> Tensor:
    data = x.data
    out_data = np.empty_like(data)
    pos = data >= 0
    out_data[pos] = 1.0 / (1.0 + np.exp(-data[pos]))
    ex = np.exp(data[~pos])
    out_data[~pos] = ex / (1.0 + ex)

    def rule(g):
        return (g * out_data * (1.0 - out_data),)

    return Tensor(out_data, (x,), rule, op="sigmoid")


def relu(x: Tensor) -> Tensor:
    out_data = np.maximum(x.data, 0.0)

    def rule(g):
        return (g * (x.data > 0.0),)

    return Tensor(out_data, (x,), rule, op="relu")


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    exp = np.exp(shifted)
    out_data = exp / exp.sum(axis=axis, keepdims=True)

    def rule(g):
        inner = (g * out_data).sum(axis=axis, keepdims=True)
        return (out_data * (g - inner),)

    return Tensor(out_data, (x,), rule, op="softmax")


def embedding_lookup(
    table: Tensor, ids: np.ndarray, mask: np.ndarray | None = None
) -> Tensor:
    """Gather rows of ``table`` for integer ``ids`` (B, T) -> (B, T, E).

    With a mask, embeddings at padded positions are zeroed and the pad rows
    of the table receive no gradient.
    """
    ids = np.asarray(ids, dtype=np.int64)
    out_data = table.data[ids]
    if mask is not None:
        mask = np.asarray(mask)
        out_data = out_data * mask[..., None]

    def rule(g):
        if mask is not None:
            g = g * mask[..., None]
        gt = np.zeros_like(table.data)
        np.add.at(gt, ids.reshape(-1), g.reshape(-1, g.shape[-1]))
        return (gt,)

    return Tensor(out_data, (table,), rule, op="embedding_lookup")


_MASKED_MIN = -1e30  # stand-in for -inf that keeps the finiteness guard usable


def max_pool_over_time(x: Tensor, mask: np.ndarray) -> Tensor:
    """Per-feature max over the time axis of (B, T, H), ignoring padding.

    Rows whose mask is entirely zero pool to the zero vector and propagate no
    gradient.
    """
    mask = np.asarray(mask)
    masked = np.where(mask[:, :, None] > 0, x.data, _MASKED_MIN)
    argmax = masked.argmax(axis=1)  # (B, H)
    out_data = np.take_along_axis(masked, argmax[:, None, :], axis=1)[:, 0, :]
    empty = mask.sum(axis=1) == 0
    if empty.any():
        out_data = out_data.copy()
        out_data[empty] = 0.0

    def rule(g):
        gx = np.zeros_like(x.data)
        batch, hidden = g.shape
        rows = np.repeat(np.arange(batch), hidden)
        cols = np.tile(np.arange(hidden), batch)
        times = argmax.reshape(-1)
        keep = ~empty[rows]
        np.add.at(gx, (rows[keep], times[keep], cols[keep]), g.reshape(-1)[keep])
        return (gx,)

    return Tensor(out_data, (x,), rule, op="max_pool_over_time")


def mean_over_time(x: Tensor, mask: np.ndarray) -> Tensor:
    """Mean over real (unmasked) time steps of (B, T, H); empty rows -> zeros."""
    mask = np.asarray(mask, dtype=np.float64)
    counts = mask.sum(axis=1)  # (B,)
    safe_counts = np.where(counts == 0, 1.0, counts)
    out_data = (x.data * mask[:, :, None]).sum(axis=1) / safe_counts[:, None]

    def rule(g):
        return (g[:, None, :] * mask[:, :, None] / safe_counts[:, None, None],)

    return Tensor(out_data, (x,), rule, op="mean_over_time")


def l2_normalize(x: Tensor, axis: int = -1) -> Tensor:
    norms = np.sqrt((x.data * x.data).sum(axis=axis, keepdims=True))
    out_data = x.data / norms  # zero rows raise via the finiteness guard

    def rule(g):
        inner = (g * x.data).sum(axis=axis, keepdims=True)
        return (g / norms - x.data * inner / norms**3,)

    return Tensor(out_data, (x,), rule, op="l2_normalize")


def cosine_similarity(u: Tensor, v: Tensor, axis: int = -1) -> Tensor:
    """Row-wise cosine similarity, clipped to [-1, 1] against rounding noise.

    Gradient is zero at clipped coordinates (they sit outside the reachable
    range only through floating-point error).
    """
    nu = np.sqrt((u.data * u.data).sum(axis=axis))
    nv = np.sqrt((v.data * v.data).sum(axis=axis))
    if np.any(nu == 0) or np.any(nv == 0):
        raise ValueError("cosine similarity of a zero vector")
    dots = (u.data * v.data).sum(axis=axis)
    raw = dots / (nu * nv)
    out_data = np.clip(raw, -1.0, 1.0)
    inside = np.abs(raw) <= 1.0

    def rule(g):
        g = g * inside
        scale = np.expand_dims(g / (nu * nv), axis)
        s_over_u2 = np.expand_dims(g * raw / (nu * nu), axis)
        s_over_v2 = np.expand_dims(g * raw / (nv * nv), axis)
        gu = scale * v.data - s_over_u2 * u.data
        gv = scale * u.data - s_over_v2 * v.data
        return gu, gv

    return Tensor(out_data, (u, v), rule, op="cosine_similarity")


def dropout(x: Tensor, rate: float, train: bool, rng: np.random.Generator | None = None) -> Tensor:
    """Inverted dropout: active only in training, identity at inference."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not train or rate == 0.0:
        def identity_rule(g):
            return (g,)
        return Tensor(x.data, (x,), identity_rule, op="dropout")
    if rng is None:
        raise ValueError("training-mode dropout needs the run RNG")
    keep = (rng.random(x.data.shape) >= rate) / (1.0 - rate)

    def rule(g):
        return (g * keep,)

    return Tensor(x.data * keep, (x,), rule, op="dropout")


_LOG_EPS = 1e-12


def cross_entropy(probs: Tensor, onehot: np.ndarray) -> Tensor:
    """Mean negative log-likelihood of one-hot targets under ``probs`` rows."""
    onehot = np.asarray(onehot, dtype=np.float64)
    if onehot.shape != probs.data.shape:
        raise ValueError(f"targets {onehot.shape} do not match probs {probs.shape}")
    batch = probs.data.shape[0]
    out_data = -(onehot * np.log(probs.data + _LOG_EPS)).sum() / batch

    def rule(g):
        return (g * (-onehot / (probs.data + _LOG_EPS)) / batch,)

    return Tensor(out_data, (probs,), rule, op="cross_entropy")


def tsum(x: Tensor) -> Tensor:
    out_data = x.data.sum()

    def rule(g):
        return (np.broadcast_to(g, x.data.shape).copy(),)

    return Tensor(out_data, (x,), rule, op="sum")


def tmean(x: Tensor) -> Tensor:
    size = x.data.size
    out_data = x.data.sum() / size

    def rule(g):
        return (np.broadcast_to(g / size, x.data.shape).copy(),)

    return Tensor(out_data, (x,), rule, op="mean")


# ---------------------------------------------------------------------------
# backward sweep
# ---------------------------------------------------------------------------

def _topo_order(root: Tensor) -> list[Tensor]:
    """Iterative post-order: parents precede children (no recursion limits)."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Tensor) -> None:
    """Populate ``.grad`` on every node reachable from a scalar loss."""
    if loss.data.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.shape}")
    order = _topo_order(loss)
    for node in order:
        node.grad = np.zeros_like(node.data)
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node.backward_rule is None:
            continue
        grads = node.backward_rule(node.grad)
        for parent, g in zip(node.parents, grads):
            if g is not None:
                parent.grad += g


# ---------------------------------------------------------------------------
# finite-difference gradient checking
# ---------------------------------------------------------------------------

@dataclass
class GradCheckFailure:
    param: str
    index: tuple[int, ...]
    analytic: float
    numeric: float
    rel_error: float


@dataclass
class GradCheckReport:
    max_rel_error: float
    n_checked: int
    failures: list[GradCheckFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def check_gradients(
    forward: Callable[[], Tensor],
    params: dict[str, Tensor],
    rtol: float = 1e-4,
    atol: float = 1e-6,
    h: float = 1e-5,
    max_coords_per_param: int | None = None,
    rng: np.random.Generator | None = None,
) -> GradCheckReport:
    """Compare reverse-mode gradients against central finite differences.

    ``forward`` must rebuild the loss from the current parameter values and
    be deterministic (dropout off or with a frozen mask).  The error of a
    coordinate is |analytic - numeric| / (atol/rtol + max(|analytic|,
    |numeric|)), i.e. relative error with an absolute floor that absorbs
    finite-difference noise around zero gradients; a coordinate fails when it
    exceeds rtol.  An empty parameter set passes vacuously.
    """
    loss = forward()
    backward(loss)
    analytic = {name: p.grad.copy() for name, p in params.items()}

    report = GradCheckReport(max_rel_error=0.0, n_checked=0)
    for name, param in params.items():
        flat = param.data.reshape(-1)
        n = flat.size
        if max_coords_per_param is None or max_coords_per_param >= n:
            coords = np.arange(n)
        else:
            if rng is None:
                rng = np.random.default_rng(0)
            coords = rng.choice(n, size=max_coords_per_param, replace=False)
        for c in coords:
            original = flat[c]
            flat[c] = original + h
            f_plus = forward().item()
            flat[c] = original - h
            f_minus = forward().item()
            flat[c] = original
            numeric = (f_plus - f_minus) / (2.0 * h)
            ad = float(analytic[name].reshape(-1)[c])
            diff = abs(ad - numeric)
            rel = diff / (atol / rtol + max(abs(ad), abs(numeric)))
            report.n_checked += 1
            report.max_rel_error = max(report.max_rel_error, rel)
            if rel > rtol:
                index = np.unravel_index(c, param.data.shape)
                report.failures.append(
                    GradCheckFailure(name, tuple(int(i) for i in index), ad, numeric, rel)
                )
    return report
