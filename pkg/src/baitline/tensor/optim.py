"""Adam and AdamW (decoupled weight decay) on named parameter dicts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Tensor


@dataclass
class OptimizerState:
    """First/second moment estimates plus hyperparameters for one run."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    step_count: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def _moments(state: OptimizerState, name: str, shape) -> tuple[np.ndarray, np.ndarray]:
    if name not in state.m:
        state.m[name] = np.zeros(shape)
        state.v[name] = np.zeros(shape)
    return state.m[name], state.v[name]


def adam_step(
    state: OptimizerState,
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
) -> dict[str, np.ndarray]:
    """One bias-corrected Adam update; returns the new parameter dict."""
    state.step_count += 1
    t = state.step_count
    bias1 = 1.0 - state.beta1**t
    bias2 = 1.0 - state.beta2**t
    out = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} != param shape {p.shape} for {name!r}")
        m, v = _moments(state, name, p.shape)
        m += (1.0 - state.beta1) * (g - m)
        v += (1.0 - state.beta2) * (g * g - v)
        update = (m / bias1) / (np.sqrt(v / bias2) + state.eps)
        out[name] = p - state.lr * update
    return out


def adamw_step(
    state: OptimizerState,
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
) -> dict[str, np.ndarray]:
    """Adam update followed by decoupled weight decay lr * wd * param."""
    decay = state.weight_decay
    updated = adam_step(state, params, grads)
    return {name: p - state.lr * decay * params[name] for name, p in updated.items()}


class GraphOptimizer:
    """In-place optimizer over a dict of graph parameter tensors."""

    def __init__(
        self,
        params: dict[str, Tensor],
        lr: float,
        weight_decay: float = 0.0,
        decoupled: bool = False,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = params
        self.decoupled = decoupled
        self.state = OptimizerState(
            lr=lr, beta1=beta1, beta2=beta2, eps=eps, weight_decay=weight_decay
        )

    def step(self) -> None:
        values = {name: p.data for name, p in self.params.items()}
        grads = {}
        for name, p in self.params.items():
            if p.grad is None:
                raise ValueError(f"parameter {name!r} has no gradient; run backward first")
            grads[name] = p.grad
        step_fn = adamw_step if self.decoupled else adam_step
        for name, new in step_fn(self.state, values, grads).items():
            self.params[name].data = new

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.grad = None
