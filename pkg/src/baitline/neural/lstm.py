"""Dual-branch bidirectional LSTM classifier over titles and contents.

Each branch runs its own embedding table through two stacked bidirectional
LSTM layers and a masked global max pool; the pooled branch vectors are
concatenated and passed through two dense+dropout blocks into a softmax over
the two classes.  Padded time steps carry hidden state through unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..corpus import Corpus
from ..tensor import (
    GraphOptimizer,
    Tensor,
    backward,
    concat,
    cross_entropy,
    dropout,
    embedding_lookup,
    max_pool_over_time,
    narrow,
    relu,
    reshape,
    sigmoid,
    softmax,
    stack_steps,
    tanh,
)
from ..textproc import Vocabulary, build_vocab, encode, load_vocab, normalize, save_vocab, tokenize
from ..tensor.checkpoint import load_tensors, save_tensors
from .encoder import uniform_param


@dataclass
class BiLstmConfig:
    title_vocab_size: int = 12000
    content_vocab_size: int = 25000
    embed_dim: int = 300
    title_units: int = 32
    content_units: int = 64
    n_layers: int = 2
    dense1: int = 128
    dense2: int = 64
    dropout_rate: float = 0.6
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-3
    title_max_len: int = 32
    content_max_len: int = 256
    seed: int = 0
    embedding_file: str | None = None  # optional pretrained word vectors


class LstmDirection:
    """Single-direction LSTM over a list of per-step (B, in_dim) tensors."""

    def __init__(self, name: str, in_dim: int, units: int, rng: np.random.Generator):
        self.name = name
        self.units = units
        self.W = uniform_param(rng, (in_dim, 4 * units))
        self.U = uniform_param(rng, (units, 4 * units))
        self.b = uniform_param(rng, (4 * units,))

    def params(self) -> dict[str, Tensor]:
        return {f"{self.name}.W": self.W, f"{self.name}.U": self.U, f"{self.name}.b": self.b}

    def run(self, steps: list[Tensor], mask: np.ndarray, reverse: bool = False) -> list[Tensor]:
        batch = steps[0].shape[0]
        units = self.units
        h = Tensor(np.zeros((batch, units)))
        c = Tensor(np.zeros((batch, units)))
        order = range(len(steps) - 1, -1, -1) if reverse else range(len(steps))
        outputs: list[Tensor | None] = [None] * len(steps)
        for t in order:
            z = steps[t] @ self.W + h @ self.U + self.b
            i = sigmoid(narrow(z, 1, 0, units))
            f = sigmoid(narrow(z, 1, units, units))
            g = tanh(narrow(z, 1, 2 * units, units))
            o = sigmoid(narrow(z, 1, 3 * units, units))
            c_new = f * c + i * g
            h_new = o * tanh(c_new)
            m = Tensor(mask[:, t : t + 1].astype(np.float64))
            keep = Tensor(1.0 - mask[:, t : t + 1].astype(np.float64))
            c = m * c_new + keep * c
            h = m * h_new + keep * h
            outputs[t] = h
        return outputs


class BiLstmLayer:
    def __init__(self, name: str, in_dim: int, units: int, rng: np.random.Generator):
        self.fwd = LstmDirection(f"{name}.fwd", in_dim, units, rng)
        self.bwd = LstmDirection(f"{name}.bwd", in_dim, units, rng)

    def params(self) -> dict[str, Tensor]:
        return {**self.fwd.params(), **self.bwd.params()}

    def run(self, steps: list[Tensor], mask: np.ndarray) -> list[Tensor]:
        forward = self.fwd.run(steps, mask, reverse=False)
        backward_ = self.bwd.run(steps, mask, reverse=True)
        return [concat([f, b], axis=1) for f, b in zip(forward, backward_)]


class BiLstmBranch:
    """Embedding table + stacked bidirectional layers + masked global max pool."""

    def __init__(self, name: str, vocab_size: int, embed_dim: int, units: int,
                 n_layers: int, rng: np.random.Generator):
        self.name = name
        self.embed_dim = embed_dim
        self.embedding = uniform_param(rng, (vocab_size, embed_dim))
        self.layers = []
        in_dim = embed_dim
        for i in range(n_layers):
            self.layers.append(BiLstmLayer(f"{name}.layer{i}", in_dim, units, rng))
            in_dim = 2 * units

    def params(self) -> dict[str, Tensor]:
        out = {f"{self.name}.embedding": self.embedding}
        for layer in self.layers:
            out.update(layer.params())
        return out

    def run(self, ids: np.ndarray, mask: np.ndarray) -> Tensor:
        batch, seq_len = ids.shape
        emb = embedding_lookup(self.embedding, ids, mask)
        steps = [
            reshape(narrow(emb, 1, t, 1), (batch, self.embed_dim)) for t in range(seq_len)
        ]
        for layer in self.layers:
            steps = layer.run(steps, mask)
        return max_pool_over_time(stack_steps(steps), mask)


class BiLstmClassifier:
    def __init__(self, config: BiLstmConfig, rng: np.random.Generator):
        self.config = config
        self.title_branch = BiLstmBranch(
            "title", config.title_vocab_size + 2, config.embed_dim,
            config.title_units, config.n_layers, rng,
        )
        self.content_branch = BiLstmBranch(
            "content", config.content_vocab_size + 2, config.embed_dim,
            config.content_units, config.n_layers, rng,
        )
        concat_dim = 2 * config.title_units + 2 * config.content_units
        self.dense1_w = uniform_param(rng, (concat_dim, config.dense1))
        self.dense1_b = uniform_param(rng, (config.dense1,))
        self.dense2_w = uniform_param(rng, (config.dense1, config.dense2))
        self.dense2_b = uniform_param(rng, (config.dense2,))
        self.out_w = uniform_param(rng, (config.dense2, 2))
        self.out_b = uniform_param(rng, (2,))

    def params(self) -> dict[str, Tensor]:
        out = {**self.title_branch.params(), **self.content_branch.params()}
        out.update({
            "head.dense1_w": self.dense1_w, "head.dense1_b": self.dense1_b,
            "head.dense2_w": self.dense2_w, "head.dense2_b": self.dense2_b,
            "head.out_w": self.out_w, "head.out_b": self.out_b,
        })
        return out

    def load_params(self, values: dict[str, np.ndarray]) -> None:
        own = self.params()
        for name, value in values.items():
            own[name].data = np.array(value)

    def forward(
        self,
        title_ids: np.ndarray,
        title_mask: np.ndarray,
        content_ids: np.ndarray,
        content_mask: np.ndarray,
        train: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Class probability rows (softmax simplex) for a batch."""
        pooled_title = self.title_branch.run(title_ids, title_mask)
        pooled_content = self.content_branch.run(content_ids, content_mask)
        x = concat([pooled_title, pooled_content], axis=1)
        rate = self.config.dropout_rate
        h1 = dropout(relu(x @ self.dense1_w + self.dense1_b), rate, train, rng)
        h2 = dropout(relu(h1 @ self.dense2_w + self.dense2_b), rate, train, rng)
        return softmax(h2 @ self.out_w + self.out_b, axis=-1)


@dataclass
class BiLstmBundle:
    model: BiLstmClassifier
    title_vocab: Vocabulary
    content_vocab: Vocabulary
    config: BiLstmConfig
    train_losses: list[float] = field(default_factory=list)

    def encode_articles(self, articles) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        cfg = self.config
        t_ids, t_masks, c_ids, c_masks = [], [], [], []
        for art in articles:
            ti, tm = encode(tokenize(normalize(art.title)), self.title_vocab, cfg.title_max_len)
            ci, cm = encode(tokenize(normalize(art.content)), self.content_vocab, cfg.content_max_len)
            t_ids.append(ti)
            t_masks.append(tm)
            c_ids.append(ci)
            c_masks.append(cm)
        return np.stack(t_ids), np.stack(t_masks), np.stack(c_ids), np.stack(c_masks)

    def predict_clickbait_proba(self, articles, batch_size: int = 64) -> np.ndarray:
        t_ids, t_masks, c_ids, c_masks = self.encode_articles(articles)
        out = []
        for start in range(0, len(t_ids), batch_size):
            sl = slice(start, start + batch_size)
            probs = self.model.forward(t_ids[sl], t_masks[sl], c_ids[sl], c_masks[sl])
            out.append(probs.data[:, 0])
        return np.concatenate(out)

    def save(self, out_dir) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        save_tensors(out_dir / "model.tensors", {k: v.data for k, v in self.model.params().items()})
        save_vocab(self.title_vocab, out_dir / "vocab_title.txt")
        save_vocab(self.content_vocab, out_dir / "vocab_content.txt")
        meta = {"family": "bilstm", "config": self.config.__dict__,
                "train_losses": self.train_losses}
        with open(out_dir / "model_meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)

    @classmethod
    def load(cls, out_dir) -> "BiLstmBundle":
        out_dir = Path(out_dir)
        with open(out_dir / "model_meta.json", encoding="utf-8") as fh:
            meta = json.load(fh)
        config = BiLstmConfig(**meta["config"])
        model = BiLstmClassifier(config, np.random.default_rng(0))
        model.load_params(load_tensors(out_dir / "model.tensors"))
        return cls(
            model=model,
            title_vocab=load_vocab(out_dir / "vocab_title.txt"),
            content_vocab=load_vocab(out_dir / "vocab_content.txt"),
            config=config,
            train_losses=list(meta.get("train_losses", [])),
        )


def train_bilstm(corpus: Corpus, config: BiLstmConfig | None = None) -> BiLstmBundle:
    """Cross-entropy training with Adam; bit-reproducible under a fixed seed."""
    if config is None:
        config = BiLstmConfig()
    if len(corpus) == 0:
        raise ValueError("cannot train on an empty corpus")
    if not corpus.is_labeled:
        raise ValueError("training needs a labeled corpus")
    labels = np.array([int(a.label) for a in corpus], dtype=np.int64)
    if len(np.unique(labels)) < 2:
        raise ValueError("training needs both classes present")
    rng = np.random.default_rng(config.seed)

    title_docs = [tokenize(normalize(a.title)) for a in corpus]
    content_docs = [tokenize(normalize(a.content)) for a in corpus]
    title_vocab = build_vocab(title_docs, config.title_vocab_size)
    content_vocab = build_vocab(content_docs, config.content_vocab_size)

    model = BiLstmClassifier(config, rng)
    if config.embedding_file:
        from .embeddings import load_pretrained_embeddings

        model.title_branch.embedding.data = load_pretrained_embeddings(
            config.embedding_file, title_vocab, config.embed_dim, rng
        )
        model.content_branch.embedding.data = load_pretrained_embeddings(
            config.embedding_file, content_vocab, config.embed_dim, rng
        )
    bundle = BiLstmBundle(
        model=model, title_vocab=title_vocab, content_vocab=content_vocab, config=config
    )
    if config.epochs == 0:
        return bundle

    t_ids, t_masks, c_ids, c_masks = bundle.encode_articles(corpus.articles)
    onehot = np.zeros((len(labels), 2))
    onehot[np.arange(len(labels)), labels] = 1.0

    optimizer = GraphOptimizer(model.params(), lr=config.learning_rate)
    n = len(labels)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            probs = model.forward(
                t_ids[batch], t_masks[batch], c_ids[batch], c_masks[batch],
                train=True, rng=rng,
            )
            loss = cross_entropy(probs, onehot[batch])
            optimizer.zero_grad()
            backward(loss)
            optimizer.step()
            epoch_loss += loss.item()
            n_batches += 1
        bundle.train_losses.append(epoch_loss / n_batches)
    return bundle
