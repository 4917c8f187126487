"""One task's complete tagger: encoder + CRF + vocabularies, and its
single-file container format.

The container is self-describing and versioned: a magic string, a JSON
header (task, labels, vocabularies, dimensions, tensor manifest), the
weight payload as little-endian float32, and a trailing SHA-256 checksum.
Byte layout details live in docs/model_format.md.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .crf import CrfParams, constrain_iob2, viterbi_decode, zero_crf
from .data import (
    EmbeddingTable,
    LabelScheme,
    Vocabulary,
    scheme_for_task,
)
from .layers import (
    BiLstmConfig,
    CharCnnConfig,
    EncoderParams,
    LstmParams,
    encode_sentence,
    init_encoder,
)
from .rng import Rng
from .tensor import Tensor

MAGIC = b"SEQLABM\x00"
FORMAT_VERSION = 1

# tag-feature columns consumed by each task, in feature order
UPSTREAM_TASKS = {"pos": (), "chunk": ("pos",), "ner": ("pos", "chunk")}


class ModelIOError(ValueError):
    pass


class ModelVersionError(ModelIOError):
    pass


class ModelChecksumError(ModelIOError):
    pass


class TaskMismatchError(ModelIOError):
    pass


@dataclass(frozen=True)
class ArchitectureConfig:
    """Encoder dimensions; the word dimension follows the embedding table."""

    char_dim: int = 30
    window: int = 3
    filters: int = 30
    hidden: int = 300
    dropout: float = 0.5
    iob2_constrained: bool = True


@dataclass
class SequenceLabelModel:
    task: str
    scheme: LabelScheme
    word_vocab: Vocabulary
    char_vocab: Vocabulary
    encoder: EncoderParams
    crf: CrfParams
    arch: ArchitectureConfig
    fingerprint: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    @property
    def upstream_tasks(self) -> tuple[str, ...]:
        return UPSTREAM_TASKS[self.task]

    def parameters(self) -> list[Tensor]:
        return self.encoder.tensors() + self.crf.tensors()

    # -- feature extraction -------------------------------------------------

    def token_ids(self, words, tag_seqs):
        word_ids = [self.word_vocab.id(w) for w in words]
        char_seqs = [[self.char_vocab.id(ch) for ch in w] for w in words]
        tag_ids = [
            [scheme_for_task(task).index(lab) for lab in labels]
            for task, labels in zip(self.upstream_tasks, tag_seqs)
        ]
        return word_ids, char_seqs, tag_ids

    def emissions(self, words, tag_seqs=(), training=False, rng=None) -> Tensor:
        word_ids, char_seqs, tag_ids = self.token_ids(words, tag_seqs)
        return encode_sentence(
            word_ids, char_seqs, tag_ids, self.encoder, training=training, rng=rng
        )

    def predict(self, words, tag_seqs=()) -> list[str]:
        """Viterbi-decoded label strings for one sentence.

        ``tag_seqs`` carries one upstream label sequence per tag feature
        (e.g. POS labels for the chunk model).
        """
        e = self.emissions(words, tag_seqs)
        path, _ = viterbi_decode(e, self.crf)
        return [self.scheme.label(i) for i in path]


def build_word_matrix(word_vocab: Vocabulary, table: EmbeddingTable, rng: Rng) -> np.ndarray:
    """Initial word embedding rows for every vocabulary entry.

    PAD is zeros; rows found in the pre-trained table (exactly or lowercased)
    are copied; remaining words get uniform rows in +-sqrt(3/d).
    """
    dim = table.dim
    bound = float(np.sqrt(3.0 / dim))
    matrix = np.zeros((len(word_vocab), dim))
    emb_vocab = table.vocabulary
    for idx, word in enumerate(word_vocab.strings):
        if idx == 0:
            continue  # PAD stays zero
        if idx == 1:
            matrix[idx] = table.matrix[1]  # shared UNK row
        elif word in emb_vocab or word.lower() in emb_vocab:
            matrix[idx] = table.matrix[emb_vocab.id(word)]
        else:
            matrix[idx] = rng.uniform_array((dim,), -bound, bound)
    return matrix


def build_model(
    task: str,
    word_vocab: Vocabulary,
    char_vocab: Vocabulary,
    embeddings: EmbeddingTable,
    rng: Rng,
    arch: ArchitectureConfig = ArchitectureConfig(),
) -> SequenceLabelModel:
    """Freshly initialized model for a task, ready for training."""
    scheme = scheme_for_task(task)
    upstream = UPSTREAM_TASKS[task]
    tag_sizes = [len(scheme_for_task(t)) for t in upstream]
    encoder = init_encoder(
        build_word_matrix(word_vocab, embeddings, rng),
        char_vocab_size=len(char_vocab),
        num_labels=len(scheme),
        tag_table_sizes=tag_sizes,
        rng=rng,
        char_config=CharCnnConfig(arch.char_dim, arch.window, arch.filters),
        lstm_config=BiLstmConfig(arch.hidden),
        dropout_rate=arch.dropout,
    )
    crf = zero_crf(len(scheme), trainable=True)
    if scheme.is_span_task and arch.iob2_constrained:
        crf = constrain_iob2(crf, scheme)
    return SequenceLabelModel(
        task=task,
        scheme=scheme,
        word_vocab=word_vocab,
        char_vocab=char_vocab,
        encoder=encoder,
        crf=crf,
        arch=arch,
    )


# -- serialization -------------------------------------------------------------


def _tensor_manifest(model: SequenceLabelModel):
    enc, crf = model.encoder, model.crf
    entries = [
        ("word_embeddings", enc.word_embeddings),
        ("char_embeddings", enc.char_embeddings),
        ("cnn_filters", enc.cnn_filters),
        ("cnn_bias", enc.cnn_bias),
        ("lstm_fwd.w_input", enc.forward_lstm.w_input),
        ("lstm_fwd.w_hidden", enc.forward_lstm.w_hidden),
        ("lstm_fwd.bias", enc.forward_lstm.bias),
        ("lstm_bwd.w_input", enc.backward_lstm.w_input),
        ("lstm_bwd.w_hidden", enc.backward_lstm.w_hidden),
        ("lstm_bwd.bias", enc.backward_lstm.bias),
        ("projection", enc.projection),
        ("projection_bias", enc.projection_bias),
    ]
    for i, table in enumerate(enc.tag_tables):
        entries.append((f"tag_table_{i}", table))
    entries += [
        ("crf.transitions", crf.transitions),
        ("crf.start_scores", crf.start_scores),
        ("crf.end_scores", crf.end_scores),
    ]
    return entries


def save_model(model: SequenceLabelModel, sink):
    """Write the versioned, checksummed container to a path or binary stream."""
    entries = _tensor_manifest(model)
    header = {
        "format_version": FORMAT_VERSION,
        "task": model.task,
        "labels": list(model.scheme.encoded_labels),
        "upstream_tasks": list(model.upstream_tasks),
        "word_vocab": model.word_vocab.non_reserved(),
        "char_vocab": model.char_vocab.non_reserved(),
        "arch": {
            "char_dim": model.arch.char_dim,
            "window": model.arch.window,
            "filters": model.arch.filters,
            "hidden": model.arch.hidden,
            "dropout": model.arch.dropout,
            "iob2_constrained": model.arch.iob2_constrained,
        },
        "fingerprint": model.fingerprint,
        "tensors": [{"name": n, "shape": list(t.data.shape)} for n, t in entries],
    }
    header_bytes = json.dumps(header, ensure_ascii=False, sort_keys=True).encode("utf-8")
    payload = b"".join(
        t.data.astype("<f4").tobytes(order="C") for _, t in entries
    )
    body = (
        MAGIC
        + FORMAT_VERSION.to_bytes(4, "little")
        + len(header_bytes).to_bytes(8, "little")
        + header_bytes
        + payload
    )
    blob = body + hashlib.sha256(body).digest()
    if isinstance(sink, (str, Path)):
        Path(sink).write_bytes(blob)
    else:
        sink.write(blob)


def load_model(source, expect_task: str | None = None) -> SequenceLabelModel:
    """Read a container back; verifies magic, version and checksum."""
    if isinstance(source, (str, Path)):
        blob = Path(source).read_bytes()
    else:
        blob = source.read()
    if len(blob) < len(MAGIC) + 12 + 32 or not blob.startswith(MAGIC):
        raise ModelIOError("not a seqlab model container")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise ModelChecksumError("model container checksum mismatch")
    stream = io.BytesIO(body[len(MAGIC):])
    version = int.from_bytes(stream.read(4), "little")
    if version != FORMAT_VERSION:
        raise ModelVersionError(
            f"container format version {version} unsupported (expected {FORMAT_VERSION})"
        )
    header_len = int.from_bytes(stream.read(8), "little")
    header = json.loads(stream.read(header_len).decode("utf-8"))
    task = header["task"]
    if expect_task is not None and task != expect_task:
        raise TaskMismatchError(f"expected a {expect_task} model, found {task}")

    word_vocab = Vocabulary(fold_case_fallback=True)
    for w in header["word_vocab"]:
        word_vocab.add(w)
    char_vocab = Vocabulary(fold_case_fallback=False)
    for c in header["char_vocab"]:
        char_vocab.add(c)

    tensors: dict[str, Tensor] = {}
    for spec in header["tensors"]:
        shape = tuple(spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        raw = stream.read(count * 4)
        if len(raw) != count * 4:
            raise ModelIOError(f"truncated payload at tensor {spec['name']!r}")
        values = np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(shape)
        tensors[spec["name"]] = Tensor(values, requires_grad=True)
    if stream.read(1):
        raise ModelIOError("trailing bytes after tensor payload")

    a = header["arch"]
    arch = ArchitectureConfig(
        char_dim=a["char_dim"], window=a["window"], filters=a["filters"],
        hidden=a["hidden"], dropout=a["dropout"],
        iob2_constrained=a["iob2_constrained"],
    )
    tag_tables = [
        tensors[f"tag_table_{i}"] for i in range(len(header["upstream_tasks"]))
    ]
    encoder = EncoderParams(
        word_embeddings=tensors["word_embeddings"],
        char_embeddings=tensors["char_embeddings"],
        cnn_filters=tensors["cnn_filters"],
        cnn_bias=tensors["cnn_bias"],
        forward_lstm=LstmParams(
            tensors["lstm_fwd.w_input"], tensors["lstm_fwd.w_hidden"],
            tensors["lstm_fwd.bias"],
        ),
        backward_lstm=LstmParams(
            tensors["lstm_bwd.w_input"], tensors["lstm_bwd.w_hidden"],
            tensors["lstm_bwd.bias"],
        ),
        projection=tensors["projection"],
        projection_bias=tensors["projection_bias"],
        tag_tables=tag_tables,
        char_config=CharCnnConfig(arch.char_dim, arch.window, arch.filters),
        lstm_config=BiLstmConfig(arch.hidden),
        dropout_rate=arch.dropout,
    )
    crf = CrfParams(
        transitions=tensors["crf.transitions"],
        start_scores=tensors["crf.start_scores"],
        end_scores=tensors["crf.end_scores"],
    )
    return SequenceLabelModel(
        task=task,
        scheme=scheme_for_task(task),
        word_vocab=word_vocab,
        char_vocab=char_vocab,
        encoder=encoder,
        crf=crf,
        arch=arch,
        fingerprint=header.get("fingerprint", {}),
        version=version,
    )
