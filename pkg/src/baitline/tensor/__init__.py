"""Numeric core: autodiff tensors, optimizers, checkpoint container."""

from .checkpoint import CheckpointVersionError, load_tensors, save_tensors
from .core import (
    GradCheckReport,
    NonFiniteError,
    Tensor,
    add,
    backward,
    check_gradients,
    concat,
    cosine_similarity,
    cross_entropy,
    dropout,
    embedding_lookup,
    l2_normalize,
    matmul,
    max_pool_over_time,
    mean_over_time,
    multiply,
    narrow,
    relu,
    reshape,
    sigmoid,
    softmax,
    stack_steps,
    sub,
    tanh,
    tmean,
    tsum,
)
from .optim import GraphOptimizer, OptimizerState, adam_step, adamw_step

__all__ = [
    "CheckpointVersionError",
    "GradCheckReport",
    "GraphOptimizer",
    "NonFiniteError",
    "OptimizerState",
    "Tensor",
    "adam_step",
    "adamw_step",
    "add",
    "backward",
    "check_gradients",
    "concat",
    "cosine_similarity",
    "cross_entropy",
    "dropout",
    "embedding_lookup",
    "l2_normalize",
    "load_tensors",
    "matmul",
    "max_pool_over_time",
    "mean_over_time",
    "multiply",
    "narrow",
    "relu",
    "reshape",
    "save_tensors",
    "sigmoid",
    "softmax",
    "stack_steps",
    "sub",
    "tanh",
    "tmean",
    "tsum",
]
