"""SGD training with per-epoch learning-rate decay, gradient clipping and
early stopping on the development metric.

Sentences are visited one at a time in a seeded shuffled order. The dev
metric is token accuracy for POS and span F1 for chunk/NER; the best-scoring
snapshot is retained and returned when patience runs out. Given the same
corpus, embeddings, config and seed, training is fully deterministic.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np

from .crf import nll_loss, repin
from .data import EmbeddingTable, LabelScheme, build_vocabularies
from .evaluation import accuracy, evaluate_spans
from .layers import encode_sentence
from .model import ArchitectureConfig, SequenceLabelModel, build_model
from .rng import Rng
from .tensor import backward

log = logging.getLogger("seqlab.training")


class TrainingError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    lr_decay: float = 0.05
    gradient_clip: float = 5.0
    max_epochs: int = 100
    patience: int = 10
    seed: int = 42
    dropout: float = 0.5

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")

    def as_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "lr_decay": self.lr_decay,
            "gradient_clip": self.gradient_clip,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "seed": self.seed,
            "dropout": self.dropout,
        }


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    dev_metric: float


def clip_gradients(tensors, max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most ``max_norm``.

    Returns the pre-clip norm.
    """
    total = 0.0
    for t in tensors:
        if t.grad is not None:
            total += float(np.sum(t.grad * t.grad))
    norm = math.sqrt(total)
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for t in tensors:
            if t.grad is not None:
                t.grad *= scale
    return norm


def sgd_step(tensors, learning_rate: float):
    for t in tensors:
        if t.grad is not None:
            t.data -= learning_rate * t.grad
            t.grad = None


def _sentence_features(model: SequenceLabelModel, sentence):
    words = sentence.words()
    tag_seqs = [sentence.labels(t) for t in model.upstream_tasks]
    gold = [model.scheme.index(lab) for lab in sentence.labels(model.task)]
    return model.token_ids(words, tag_seqs), gold


def dev_metric(model: SequenceLabelModel, dev_set) -> float:
    """Token accuracy for POS models, overall span F1 otherwise."""
    gold_seqs = [s.labels(model.task) for s in dev_set]
    pred_seqs = [
        model.predict(s.words(), [s.labels(t) for t in model.upstream_tasks])
        for s in dev_set
    ]
    if model.scheme.is_span_task:
        return evaluate_spans(gold_seqs, pred_seqs, model.scheme).overall.f1
    return accuracy(gold_seqs, pred_seqs)


def _snapshot(model: SequenceLabelModel):
    return [t.data.copy() for t in model.parameters()]


def _restore(model: SequenceLabelModel, snapshot):
    for t, saved in zip(model.parameters(), snapshot):
        t.data[:] = saved


def train(
    train_set,
    dev_set,
    embeddings: EmbeddingTable,
    scheme: LabelScheme,
    config: TrainConfig = TrainConfig(),
    arch: ArchitectureConfig | None = None,
):
    """Fit one task's model; returns (best model, per-epoch history)."""
    if not train_set:
        raise TrainingError("training set is empty")
    if not dev_set:
        raise TrainingError("development set is empty")

    rng = Rng(config.seed)
    arch = dataclasses.replace(arch or ArchitectureConfig(), dropout=config.dropout)

    word_vocab, char_vocab, _ = build_vocabularies(train_set, embeddings.vocabulary)
    model = build_model(scheme.task, word_vocab, char_vocab, embeddings, rng, arch)
    model.fingerprint = {"train_config": config.as_dict()}

    features = [_sentence_features(model, s) for s in train_set]
    params = model.parameters()
    constrained = scheme.is_span_task and arch.iob2_constrained

    history: list[EpochStats] = []
    best_score = -math.inf
    best_params = None
    bad_epochs = 0

    for epoch in range(config.max_epochs):
        lr = config.learning_rate / (1.0 + config.lr_decay * epoch)
        order = rng.shuffled(range(len(features)))
        total_loss = 0.0
        for idx in order:
            (word_ids, char_seqs, tag_ids), gold = features[idx]
            emissions = encode_sentence(
                word_ids, char_seqs, tag_ids, model.encoder, training=True, rng=rng
            )
            loss = nll_loss(emissions, gold, model.crf)
            value = loss.item()
            if not math.isfinite(value):
                raise TrainingError(
                    f"non-finite loss at sentence {idx} in epoch {epoch + 1}"
                )
            total_loss += value
            backward(loss)
            clip_gradients(params, config.gradient_clip)
            sgd_step(params, lr)
            if constrained:
                repin(model.crf, scheme)
        score = dev_metric(model, dev_set)
        history.append(EpochStats(epoch + 1, total_loss / len(features), score))
        log.info("epoch %d: loss %.4f, dev %.2f", epoch + 1, history[-1].train_loss, score)
        if score >= best_score:
            # ties refresh the snapshot: among equally-scoring epochs the
            # longer-trained model wins, but only strict gains reset patience
            best_params = _snapshot(model)
        if score > best_score:
            best_score = score
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                break

    _restore(model, best_params)
    return model, history
