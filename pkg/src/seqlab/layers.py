"""Sentence encoder: word embedding + char-CNN features -> BiLSTM -> emissions.

Each token is represented by the concatenation of its word embedding, a
character-level CNN feature vector, and (for downstream tasks) one learned
embedding per upstream tag column. The sequence runs through a forward and a
backward LSTM; their hidden states are concatenated per token and projected
to one emission score per label.

Sentences are processed one at a time with their exact lengths; there is no
batching or padding of the token dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .data import PAD_ID
from .rng import Rng
from .tensor import Tensor

TAG_FEATURE_DIM = 30


@dataclass(frozen=True)
class CharCnnConfig:
    char_dim: int = 30
    window: int = 3
    filters: int = 30

    def __post_init__(self):
        if self.window % 2 == 0 or self.window < 1:
            raise ValueError(f"window must be odd and positive, got {self.window}")
        if self.filters < 1:
            raise ValueError("need at least one filter")


@dataclass(frozen=True)
class BiLstmConfig:
    hidden: int = 300

    def __post_init__(self):
        if self.hidden < 1:
            raise ValueError("hidden size must be positive")


@dataclass
class LstmParams:
    """One direction's weights; gate order along the 4H axis is i, f, g, o."""

    w_input: Tensor    # input_dim x 4H
    w_hidden: Tensor   # H x 4H
    bias: Tensor       # 4H

    @property
    def hidden(self) -> int:
        return self.w_hidden.data.shape[0]

    def tensors(self):
        return [self.w_input, self.w_hidden, self.bias]


@dataclass
class EncoderParams:
    """All trainable weights of one task's encoder."""

    word_embeddings: Tensor          # |Vw| x word_dim
    char_embeddings: Tensor          # |Vc| x char_dim
    cnn_filters: Tensor              # filters x (window * char_dim)
    cnn_bias: Tensor                 # filters
    forward_lstm: LstmParams
    backward_lstm: LstmParams
    projection: Tensor               # 2H x num_labels
    projection_bias: Tensor          # num_labels
    tag_tables: list[Tensor] = field(default_factory=list)
    char_config: CharCnnConfig = CharCnnConfig()
    lstm_config: BiLstmConfig = BiLstmConfig()
    dropout_rate: float = 0.5

    def tensors(self) -> list[Tensor]:
        out = [
            self.word_embeddings, self.char_embeddings,
            self.cnn_filters, self.cnn_bias,
        ]
        out += self.forward_lstm.tensors()
        out += self.backward_lstm.tensors()
        out += [self.projection, self.projection_bias]
        out += self.tag_tables
        return out


def _glorot(rng: Rng, rows: int, cols: int) -> np.ndarray:
    bound = float(np.sqrt(6.0 / (rows + cols)))
    return rng.uniform_array((rows, cols), -bound, bound)


def _embedding_init(rng: Rng, rows: int, dim: int) -> np.ndarray:
    # unit-variance rows (uniform +-sqrt(3)), the usual init for learned
    # categorical embeddings
    bound = float(np.sqrt(3.0))
    return rng.uniform_array((rows, dim), -bound, bound)


def _init_lstm(rng: Rng, input_dim: int, hidden: int) -> LstmParams:
    bias = np.zeros(4 * hidden)
    bias[hidden:2 * hidden] = 1.0  # forget gate opens by default
    return LstmParams(
        w_input=Tensor(_glorot(rng, input_dim, 4 * hidden), requires_grad=True),
        w_hidden=Tensor(_glorot(rng, hidden, 4 * hidden), requires_grad=True),
        bias=Tensor(bias, requires_grad=True),
    )


def init_encoder(
    word_matrix: np.ndarray,
    char_vocab_size: int,
    num_labels: int,
    tag_table_sizes: list[int],
    rng: Rng,
    char_config: CharCnnConfig = CharCnnConfig(),
    lstm_config: BiLstmConfig = BiLstmConfig(),
    dropout_rate: float = 0.5,
    train_word_embeddings: bool = True,
) -> EncoderParams:
    """Fresh encoder weights; ``word_matrix`` rows are copied as given."""
    cc, lc = char_config, lstm_config
    word_dim = word_matrix.shape[1]
    input_dim = word_dim + cc.filters + TAG_FEATURE_DIM * len(tag_table_sizes)
    return EncoderParams(
        word_embeddings=Tensor(word_matrix.copy(), requires_grad=train_word_embeddings),
        char_embeddings=Tensor(
            _embedding_init(rng, char_vocab_size, cc.char_dim), requires_grad=True
        ),
        cnn_filters=Tensor(
            _glorot(rng, cc.filters, cc.window * cc.char_dim), requires_grad=True
        ),
        cnn_bias=Tensor(np.zeros(cc.filters), requires_grad=True),
        forward_lstm=_init_lstm(rng, input_dim, lc.hidden),
        backward_lstm=_init_lstm(rng, input_dim, lc.hidden),
        projection=Tensor(_glorot(rng, 2 * lc.hidden, num_labels), requires_grad=True),
        projection_bias=Tensor(np.zeros(num_labels), requires_grad=True),
        tag_tables=[
            Tensor(_embedding_init(rng, size, TAG_FEATURE_DIM), requires_grad=True)
            for size in tag_table_sizes
        ],
        char_config=cc,
        lstm_config=lc,
        dropout_rate=dropout_rate,
    )


# -- char CNN -----------------------------------------------------------------


def char_cnn_features(char_ids, params: EncoderParams) -> Tensor:
    """Fixed-width feature vector for one word's character id sequence.

    The word is padded with one PAD character per side (window//2 in
    general), convolved at every padded position (out-of-range rows are
    zero), and max-pooled over time. A word of n characters therefore pools
    over n + window - 1 convolution positions.
    """
    if len(char_ids) == 0:
        raise ValueError("cannot featurize an empty word")
    cc = params.char_config
    pad = cc.window // 2
    ids = [PAD_ID] * pad + list(char_ids) + [PAD_ID] * pad
    emb = T.gather_rows(params.char_embeddings, ids)
    zero = Tensor(np.zeros((pad, cc.char_dim)))
    extended = T.concat([zero, emb, zero], axis=0)
    positions = len(ids)
    windows = T.concat(
        [T.narrow(extended, 0, k, positions) for k in range(cc.window)], axis=1
    )
    conv = T.matmul(windows, T.transpose(params.cnn_filters)) \
        + T.reshape(params.cnn_bias, (1, cc.filters))
    return T.max_over_axis(conv, axis=0)


# -- LSTM -----------------------------------------------------------------------


def _gate_update(gates: Tensor, c: Tensor, hidden: int):
    i = T.sigmoid(T.narrow(gates, 1, 0, hidden))
    f = T.sigmoid(T.narrow(gates, 1, hidden, hidden))
    g = T.tanh(T.narrow(gates, 1, 2 * hidden, hidden))
    o = T.sigmoid(T.narrow(gates, 1, 3 * hidden, hidden))
    c_next = f * c + i * g
    h_next = o * T.tanh(c_next)
    return h_next, c_next


def lstm_step(x: Tensor, state, params: LstmParams):
    """One gated update; ``x`` is a 1 x input row, state is (h, c)."""
    h, c = state
    hidden = params.hidden
    gates = T.matmul(x, params.w_input) + T.reshape(params.bias, (1, 4 * hidden)) \
        + T.matmul(h, params.w_hidden)
    return _gate_update(gates, c, hidden)


def _run_direction(inputs: Tensor, params: LstmParams, reverse: bool) -> Tensor:
    """Hidden states for one direction, as a T x H matrix in token order."""
    t_len = inputs.data.shape[0]
    hidden = params.hidden
    gates_all = T.matmul(inputs, params.w_input) \
        + T.reshape(params.bias, (1, 4 * hidden))
    h = Tensor(np.zeros((1, hidden)))
    c = Tensor(np.zeros((1, hidden)))
    rows: list[Tensor | None] = [None] * t_len
    order = range(t_len - 1, -1, -1) if reverse else range(t_len)
    for t in order:
        gates = T.narrow(gates_all, 0, t, 1) + T.matmul(h, params.w_hidden)
        h, c = _gate_update(gates, c, hidden)
        rows[t] = h
    return T.concat(rows, axis=0)


# -- dropout ---------------------------------------------------------------------


def apply_dropout(x: Tensor, rate: float, rng: Rng | None, training: bool) -> Tensor:
    """Inverted dropout; identity when not training or rate is zero."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ValueError("training-mode dropout needs an rng")
    keep = rng.uniform_array(x.data.shape, 0.0, 1.0) >= rate
    mask = keep.astype(np.float64) / (1.0 - rate)
    return x * Tensor(mask)


# -- full encoder ------------------------------------------------------------------


def encode_sentence(
    word_ids,
    char_id_seqs,
    tag_id_seqs,
    params: EncoderParams,
    training: bool = False,
    rng: Rng | None = None,
) -> Tensor:
    """Emission scores, one row per token.

    ``tag_id_seqs`` holds one id sequence per configured tag-feature table
    (e.g. predicted POS ids for the chunking model); pass an empty list for
    the POS model itself.
    """
    t_len = len(word_ids)
    if t_len == 0:
        raise ValueError("cannot encode an empty sentence")
    if len(tag_id_seqs) != len(params.tag_tables):
        raise ValueError(
            f"model expects {len(params.tag_tables)} tag feature sequences, "
            f"got {len(tag_id_seqs)}"
        )
    pieces = [T.gather_rows(params.word_embeddings, word_ids)]
    char_rows = [
        T.reshape(char_cnn_features(ids, params), (1, params.char_config.filters))
        for ids in char_id_seqs
    ]
    pieces.append(T.concat(char_rows, axis=0))
    for table, ids in zip(params.tag_tables, tag_id_seqs):
        pieces.append(T.gather_rows(table, ids))
    inputs = T.concat(pieces, axis=1)
    inputs = apply_dropout(inputs, params.dropout_rate, rng, training)

    states = T.concat(
        [
            _run_direction(inputs, params.forward_lstm, reverse=False),
            _run_direction(inputs, params.backward_lstm, reverse=True),
        ],
        axis=1,
    )
    states = apply_dropout(states, params.dropout_rate, rng, training)
    num_labels = params.projection.data.shape[1]
    return T.matmul(states, params.projection) \
        + T.reshape(params.projection_bias, (1, num_labels))
