"""Siamese title-content model trained with a cosine contrastive loss.

One shared encoder maps titles and contents into a metric space of unit
vectors.  Training pulls non-clickbait (label 1) title-content pairs together
and pushes clickbait (label 0) pairs apart until their cosine dissimilarity
reaches the margin; each article is its own pair, so no mining is needed.
Inference thresholds the title-content cosine similarity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..corpus import Corpus, Label, NewsArticle
from ..tensor import (
    GraphOptimizer,
    Tensor,
    backward,
    concat,
    cosine_similarity,
    l2_normalize,
    relu,
    tmean,
)
from ..textproc import Vocabulary, build_vocab, encode, load_vocab, normalize, save_vocab, tokenize
from ..tensor.checkpoint import load_tensors, save_tensors
from .encoder import PooledTextEncoder


@dataclass
class SiameseConfig:
    epochs: int = 5
    batch_size: int = 4
    learning_rate: float = 1e-6
    margin: float = 1.0
    max_len: int = 256
    threshold: float = 0.75
    vocab_size: int = 25000
    embed_dim: int = 300
    out_dim: int = 128
    seed: int = 0
    embedding_file: str | None = None  # optional pretrained word vectors


class SiameseEncoder:
    """Shared encoder producing L2-normalized sequence embeddings.

    A small constant anchor coordinate is appended to the pooled vector
    before normalization, keeping the pre-normalization norm bounded away
    from zero; without it, saturated tanh outputs can cancel in the mean pool
    to an exact zero vector, which has no direction to normalize.  The anchor
    is kept small so similarities stay close to the pure cosine of the pooled
    parts.
    """

    ANCHOR = 0.1

    def __init__(self, config: SiameseConfig, rng: np.random.Generator):
        self.config = config
        self.core = PooledTextEncoder(
            vocab_size=config.vocab_size + 2,
            embed_dim=config.embed_dim,
            out_dim=config.out_dim,
            rng=rng,
        )

    def params(self) -> dict[str, Tensor]:
        return self.core.params(prefix="siamese")

    def encode_graph(self, ids: np.ndarray, mask: np.ndarray) -> Tensor:
        pooled = self.core.encode(ids, mask)
        anchor = Tensor(np.full((pooled.shape[0], 1), self.ANCHOR))
        return l2_normalize(concat([pooled, anchor], axis=1))

    def encode(self, ids: np.ndarray, mask: np.ndarray) -> np.ndarray:
        return self.encode_graph(ids, mask).data


def cosine_dissimilarity_graph(u: Tensor, v: Tensor) -> Tensor:
    """delta = 1 - cos(u, v), elementwise over batch rows; range [0, 2]."""
    return 1.0 - cosine_similarity(u, v)


def cosine_dissimilarity(u: np.ndarray, v: np.ndarray) -> float | np.ndarray:
    """Numeric convenience wrapper over the graph op."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    squeeze = u.ndim == 1
    out = cosine_dissimilarity_graph(Tensor(np.atleast_2d(u)), Tensor(np.atleast_2d(v))).data
    return float(out[0]) if squeeze else out


def contrastive_loss_graph(v_t: Tensor, v_c: Tensor, y: np.ndarray, margin: float = 1.0) -> Tensor:
    """Mean over the batch of y*delta + (1-y)*max(0, margin - delta)."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or not np.all((y == 0.0) | (y == 1.0)):
        raise ValueError("labels must be a flat 0/1 vector")
    delta = cosine_dissimilarity_graph(v_t, v_c)
    pull = Tensor(y) * delta
    push = Tensor(1.0 - y) * relu(margin - delta)
    return tmean(pull + push)


def contrastive_loss(v_t: np.ndarray, v_c: np.ndarray, y: np.ndarray, margin: float = 1.0) -> float:
    """Loss value for plain arrays (rows are embedding vectors)."""
    return contrastive_loss_graph(
        Tensor(np.atleast_2d(np.asarray(v_t, dtype=np.float64))),
        Tensor(np.atleast_2d(np.asarray(v_c, dtype=np.float64))),
        np.atleast_1d(y),
        margin,
    ).item()


@dataclass
class SiameseBundle:
    """Trained encoder plus the preprocessing state needed for inference."""

    encoder: SiameseEncoder
    vocab: Vocabulary
    config: SiameseConfig
    train_losses: list[float] = field(default_factory=list)

    def _encode_text(self, text: str) -> tuple[np.ndarray, np.ndarray]:
        doc = tokenize(normalize(text))
        ids, mask = encode(doc, self.vocab, self.config.max_len)
        return ids[None, :], mask[None, :]

    def similarity(self, article: NewsArticle) -> float:
        """Cosine similarity between the article's title and content."""
        if not article.title.strip() or not article.content.strip():
            raise ValueError(f"article {article.id!r} has an empty side")
        t_ids, t_mask = self._encode_text(article.title)
        c_ids, c_mask = self._encode_text(article.content)
        v_t = self.encoder.encode(t_ids, t_mask)
        v_c = self.encoder.encode(c_ids, c_mask)
        return float(
            cosine_similarity(Tensor(v_t), Tensor(v_c)).data[0]
        )

    def predict(self, article: NewsArticle) -> tuple[Label, float]:
        return contrastive_predict(self, article, self.config.threshold)

    def save(self, out_dir) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        save_tensors(out_dir / "model.tensors", {k: v.data for k, v in self.encoder.params().items()})
        save_vocab(self.vocab, out_dir / "vocab.txt")
        meta = {"family": "contrastive", "config": self.config.__dict__,
                "train_losses": self.train_losses}
        with open(out_dir / "model_meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)

    @classmethod
    def load(cls, out_dir) -> "SiameseBundle":
        out_dir = Path(out_dir)
        with open(out_dir / "model_meta.json", encoding="utf-8") as fh:
            meta = json.load(fh)
        config = SiameseConfig(**meta["config"])
        encoder = SiameseEncoder(config, np.random.default_rng(0))
        encoder.core.load_params(load_tensors(out_dir / "model.tensors"), prefix="siamese")
        vocab = load_vocab(out_dir / "vocab.txt")
        return cls(encoder=encoder, vocab=vocab, config=config,
                   train_losses=list(meta.get("train_losses", [])))


def similarity_to_prediction(s: float, threshold: float = 0.75) -> tuple[Label, float]:
    """Label and clickbait score from a title-content cosine similarity.

    Non-clickbait iff s >= threshold (boundary inclusive); the soft clickbait
    score maps s to clamp((1 - s)/2, 0, 1) so ensembles can consume it.
    """
    label = Label.NON_CLICKBAIT if s >= threshold else Label.CLICKBAIT
    score = min(max((1.0 - s) / 2.0, 0.0), 1.0)
    return label, score


def contrastive_predict(
    bundle: SiameseBundle, article: NewsArticle, threshold: float = 0.75
) -> tuple[Label, float]:
    """Threshold the article's title-content similarity."""
    return similarity_to_prediction(bundle.similarity(article), threshold)


def _corpus_pairs(
    corpus: Corpus, vocab: Vocabulary, max_len: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    t_ids, t_masks, c_ids, c_masks, labels = [], [], [], [], []
    for art in corpus:
        ti, tm = encode(tokenize(normalize(art.title)), vocab, max_len)
        ci, cm = encode(tokenize(normalize(art.content)), vocab, max_len)
        t_ids.append(ti)
        t_masks.append(tm)
        c_ids.append(ci)
        c_masks.append(cm)
        labels.append(int(art.label))
    return (
        np.stack(t_ids), np.stack(t_masks),
        np.stack(c_ids), np.stack(c_masks),
        np.array(labels, dtype=np.int64),
    )


def train_contrastive(corpus: Corpus, config: SiameseConfig | None = None) -> SiameseBundle:
    """Minimize the contrastive loss over (title, content, label) triples.

    Every article contributes exactly one pair.  With a fixed seed the whole
    run (init, shuffling) is bit-reproducible; epochs=0 returns the freshly
    initialized encoder.
    """
    if config is None:
        config = SiameseConfig()
    if len(corpus) == 0:
        raise ValueError("cannot train on an empty corpus")
    if not corpus.is_labeled:
        raise ValueError("contrastive training needs a labeled corpus")
    rng = np.random.default_rng(config.seed)

    docs = []
    for art in corpus:
        docs.append(tokenize(normalize(art.title)))
        docs.append(tokenize(normalize(art.content)))
    vocab = build_vocab(docs, config.vocab_size)

    encoder = SiameseEncoder(config, rng)
    if config.embedding_file:
        from .embeddings import load_pretrained_embeddings

        encoder.core.embedding.data = load_pretrained_embeddings(
            config.embedding_file, vocab, config.embed_dim, rng
        )
    bundle = SiameseBundle(encoder=encoder, vocab=vocab, config=config)
    if config.epochs == 0:
        return bundle

    t_ids, t_masks, c_ids, c_masks, labels = _corpus_pairs(corpus, vocab, config.max_len)
    optimizer = GraphOptimizer(encoder.params(), lr=config.learning_rate)
    n = len(labels)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            v_t = encoder.encode_graph(t_ids[batch], t_masks[batch])
            v_c = encoder.encode_graph(c_ids[batch], c_masks[batch])
            loss = contrastive_loss_graph(v_t, v_c, labels[batch], config.margin)
            optimizer.zero_grad()
            backward(loss)
            optimizer.step()
            epoch_loss += loss.item()
            n_batches += 1
        bundle.train_losses.append(epoch_loss / n_batches)
    return bundle
