"""Trainable pooled text encoder shared by the Siamese and head classifiers.

Pipeline per sequence: embedding lookup, centering by the mean embedding of
the non-padding tokens, a per-token tanh projection, then a masked mean pool.
Two placement choices keep the pipeline non-degenerate: the projection sits
between centering and pooling (mean-pooling centered embeddings directly is
identically zero), and the sequence-mean embedding re-enters the projection
as a context term (with static embeddings, the centered residuals alone
carry no sequence-level content to pool).
"""

from __future__ import annotations

import numpy as np

from ..tensor import (
    Tensor,
    embedding_lookup,
    mean_over_time,
    multiply,
    reshape,
    sub,
    tanh,
)


def uniform_param(rng: np.random.Generator, shape, scale: float = 0.1) -> Tensor:
    return Tensor(rng.uniform(-scale, scale, size=shape))


class PooledTextEncoder:
    """Token ids + mask -> (B, out_dim) summary vectors."""

    def __init__(self, vocab_size: int, embed_dim: int, out_dim: int, rng: np.random.Generator):
        self.vocab_size = vocab_size
        self.embed_dim = embed_dim
        self.out_dim = out_dim
        self.embedding = uniform_param(rng, (vocab_size, embed_dim))
        self.proj_w = uniform_param(rng, (embed_dim, out_dim))
        self.ctx_w = uniform_param(rng, (embed_dim, out_dim))
        self.proj_b = uniform_param(rng, (out_dim,))

    def params(self, prefix: str = "encoder") -> dict[str, Tensor]:
        return {
            f"{prefix}.embedding": self.embedding,
            f"{prefix}.proj_w": self.proj_w,
            f"{prefix}.ctx_w": self.ctx_w,
            f"{prefix}.proj_b": self.proj_b,
        }

    def load_params(self, values: dict[str, np.ndarray], prefix: str = "encoder") -> None:
        self.embedding.data = np.array(values[f"{prefix}.embedding"])
        self.proj_w.data = np.array(values[f"{prefix}.proj_w"])
        self.ctx_w.data = np.array(values[f"{prefix}.ctx_w"])
        self.proj_b.data = np.array(values[f"{prefix}.proj_b"])

    def encode(self, ids: np.ndarray, mask: np.ndarray) -> Tensor:
        """Build the encoding graph for a batch; every row needs a real token."""
        ids = np.atleast_2d(np.asarray(ids, dtype=np.int64))
        mask = np.atleast_2d(np.asarray(mask))
        if (mask.sum(axis=1) == 0).any():
            raise ValueError("cannot encode an all-padding sequence")
        batch, seq_len = ids.shape
        emb = embedding_lookup(self.embedding, ids, mask)  # (B, T, E)
        center = mean_over_time(emb, mask)  # (B, E)
        centered = sub(emb, reshape(center, (batch, 1, self.embed_dim)))
        centered = multiply(centered, Tensor(mask[:, :, None].astype(np.float64)))
        flat = reshape(centered, (batch * seq_len, self.embed_dim))
        token_part = reshape(flat @ self.proj_w, (batch, seq_len, self.out_dim))
        context = reshape(center @ self.ctx_w + self.proj_b, (batch, 1, self.out_dim))
        tokens = tanh(token_part + context)
        return mean_over_time(tokens, mask)
