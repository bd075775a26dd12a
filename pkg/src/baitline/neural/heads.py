"""Classification head over a pluggable sequence encoder.

The input is the title and content joined into one sequence by a reserved
separator id, mirroring single-sequence fine-tuning setups.  Any encoder
exposing ``encode(ids, mask) -> Tensor`` and ``params()`` plugs in; the
default is the toolkit's own pooled text encoder.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..corpus import Corpus, NewsArticle
from ..tensor import GraphOptimizer, Tensor, backward, cross_entropy, dropout, relu, softmax
from ..textproc import (
    Vocabulary,
    build_vocab,
    encode_ids,
    load_vocab,
    normalize,
    save_vocab,
    tokenize,
)
from ..tensor.checkpoint import load_tensors, save_tensors
from .encoder import PooledTextEncoder, uniform_param


@dataclass
class EncoderHeadConfig:
    dropout_rate: float = 0.2
    dense: int = 128
    epochs: int = 10
    batch_size: int = 4
    learning_rate: float = 2e-5
    weight_decay: float = 0.01
    max_len: int = 256
    vocab_size: int = 25000
    embed_dim: int = 300
    encoder_dim: int = 128
    seed: int = 0


def join_with_separator(
    title_ids: list[int], content_ids: list[int], vocab: Vocabulary, max_len: int
) -> tuple[np.ndarray, np.ndarray]:
    """title ids + [separator] + content ids, padded/truncated to max_len."""
    sep = vocab.separator_id
    if sep is None:
        raise ValueError("vocabulary has no separator id; build it with include_separator")
    return encode_ids(list(title_ids) + [sep] + list(content_ids), max_len)


class EncoderHead:
    """Dropout -> dense -> softmax classifier on encoder summary vectors."""

    def __init__(self, encoder, in_dim: int, config: EncoderHeadConfig, rng: np.random.Generator):
        self.encoder = encoder
        self.config = config
        self.dense_w = uniform_param(rng, (in_dim, config.dense))
        self.dense_b = uniform_param(rng, (config.dense,))
        self.out_w = uniform_param(rng, (config.dense, 2))
        self.out_b = uniform_param(rng, (2,))

    def params(self) -> dict[str, Tensor]:
        out = dict(self.encoder.params(prefix="encoder"))
        out.update({
            "head.dense_w": self.dense_w, "head.dense_b": self.dense_b,
            "head.out_w": self.out_w, "head.out_b": self.out_b,
        })
        return out

    def load_params(self, values: dict[str, np.ndarray]) -> None:
        own = self.params()
        for name, value in values.items():
            own[name].data = np.array(value)

    def forward(
        self,
        ids: np.ndarray,
        mask: np.ndarray,
        train: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        summary = self.encoder.encode(ids, mask)
        x = dropout(summary, self.config.dropout_rate, train, rng)
        h = relu(x @ self.dense_w + self.dense_b)
        return softmax(h @ self.out_w + self.out_b, axis=-1)


@dataclass
class EncoderHeadBundle:
    head: EncoderHead
    vocab: Vocabulary
    config: EncoderHeadConfig
    train_losses: list[float] = field(default_factory=list)

    def encode_article(self, article: NewsArticle) -> tuple[np.ndarray, np.ndarray]:
        title_doc = tokenize(normalize(article.title))
        content_doc = tokenize(normalize(article.content))
        title_ids = [self.vocab.id_for(t) for t in title_doc.tokens]
        content_ids = [self.vocab.id_for(t) for t in content_doc.tokens]
        return join_with_separator(title_ids, content_ids, self.vocab, self.config.max_len)

    def encode_articles(self, articles) -> tuple[np.ndarray, np.ndarray]:
        pairs = [self.encode_article(a) for a in articles]
        return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs])

    def predict_clickbait_proba(self, articles, batch_size: int = 64) -> np.ndarray:
        ids, masks = self.encode_articles(articles)
        out = []
        for start in range(0, len(ids), batch_size):
            sl = slice(start, start + batch_size)
            probs = self.head.forward(ids[sl], masks[sl])
            out.append(probs.data[:, 0])
        return np.concatenate(out)

    def save(self, out_dir) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        save_tensors(out_dir / "model.tensors", {k: v.data for k, v in self.head.params().items()})
        save_vocab(self.vocab, out_dir / "vocab.txt")
        meta = {"family": "encoder-head", "config": self.config.__dict__,
                "train_losses": self.train_losses}
        with open(out_dir / "model_meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)

    @classmethod
    def load(cls, out_dir) -> "EncoderHeadBundle":
        out_dir = Path(out_dir)
        with open(out_dir / "model_meta.json", encoding="utf-8") as fh:
            meta = json.load(fh)
        config = EncoderHeadConfig(**meta["config"])
        rng = np.random.default_rng(0)
        encoder = PooledTextEncoder(config.vocab_size + 2, config.embed_dim,
                                    config.encoder_dim, rng)
        head = EncoderHead(encoder, config.encoder_dim, config, rng)
        head.load_params(load_tensors(out_dir / "model.tensors"))
        return cls(
            head=head,
            vocab=load_vocab(out_dir / "vocab.txt"),
            config=config,
            train_losses=list(meta.get("train_losses", [])),
        )


def train_encoder_head(corpus: Corpus, config: EncoderHeadConfig | None = None) -> EncoderHeadBundle:
    """Cross-entropy training with AdamW (decoupled weight decay)."""
    if config is None:
        config = EncoderHeadConfig()
    if len(corpus) == 0:
        raise ValueError("cannot train on an empty corpus")
    if not corpus.is_labeled:
        raise ValueError("training needs a labeled corpus")
    labels = np.array([int(a.label) for a in corpus], dtype=np.int64)
    if len(np.unique(labels)) < 2:
        raise ValueError("training needs both classes present")
    rng = np.random.default_rng(config.seed)

    docs = []
    for art in corpus:
        docs.append(tokenize(normalize(art.title)))
        docs.append(tokenize(normalize(art.content)))
    vocab = build_vocab(docs, config.vocab_size, include_separator=True)

    encoder = PooledTextEncoder(config.vocab_size + 2, config.embed_dim,
                                config.encoder_dim, rng)
    head = EncoderHead(encoder, config.encoder_dim, config, rng)
    bundle = EncoderHeadBundle(head=head, vocab=vocab, config=config)
    if config.epochs == 0:
        return bundle

    ids, masks = bundle.encode_articles(corpus.articles)
    onehot = np.zeros((len(labels), 2))
    onehot[np.arange(len(labels)), labels] = 1.0

    optimizer = GraphOptimizer(
        head.params(), lr=config.learning_rate,
        weight_decay=config.weight_decay, decoupled=True,
    )
    n = len(labels)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            probs = head.forward(ids[batch], masks[batch], train=True, rng=rng)
            loss = cross_entropy(probs, onehot[batch])
            optimizer.zero_grad()
            backward(loss)
            optimizer.step()
            epoch_loss += loss.item()
            n_batches += 1
        bundle.train_losses.append(epoch_loss / n_batches)
    return bundle
