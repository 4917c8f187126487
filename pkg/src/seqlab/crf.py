"""Linear-chain CRF over per-token emission scores.

A path y_1..y_T is scored

    start[y_1] + sum_t emissions[t, y_t] + sum_t transitions[y_{t-1}, y_t]
    + end[y_T]

Training uses the exact negative log-likelihood (forward algorithm with
logsumexp recurrences); decoding uses Viterbi. Transition entries can be
pinned to a large negative sentinel to forbid IOB2-invalid label bigrams;
the sentinel is finite so the partition function and its gradients stay
defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .data import LabelScheme
from .tensor import Tensor

# Finite stand-in for -inf; exp(-1e4) underflows to zero in the forward pass.
NEG_SENTINEL = -1e4


@dataclass
class CrfParams:
    """Transition table plus start/end scores for L labels."""

    transitions: Tensor    # L x L, [i, j] scores label j following label i
    start_scores: Tensor   # L
    end_scores: Tensor     # L

    @property
    def num_labels(self) -> int:
        return self.start_scores.data.shape[0]

    def tensors(self) -> list[Tensor]:
        return [self.transitions, self.start_scores, self.end_scores]


def zero_crf(num_labels: int, trainable: bool = True) -> CrfParams:
    return CrfParams(
        transitions=Tensor(np.zeros((num_labels, num_labels)), requires_grad=trainable),
        start_scores=Tensor(np.zeros(num_labels), requires_grad=trainable),
        end_scores=Tensor(np.zeros(num_labels), requires_grad=trainable),
    )


def _check_labels(labels, length: int, num_labels: int):
    if len(labels) != length:
        raise ValueError(f"got {len(labels)} labels for {length} emission rows")
    for y in labels:
        if not 0 <= y < num_labels:
            raise ValueError(f"label index {y} out of range [0, {num_labels})")


def path_score(emissions: Tensor, labels, params: CrfParams) -> Tensor:
    """Score of one label path; differentiable in emissions and params."""
    t_len, n_labels = emissions.data.shape
    _check_labels(labels, t_len, n_labels)
    emit = T.take_flat(emissions, [t * n_labels + y for t, y in enumerate(labels)])
    score = T.tensor_sum(emit) + T.take_flat(params.start_scores, [labels[0]]).sum() \
        + T.take_flat(params.end_scores, [labels[-1]]).sum()
    if t_len > 1:
        trans = T.take_flat(
            params.transitions,
            [labels[t - 1] * n_labels + labels[t] for t in range(1, t_len)],
        )
        score = score + T.tensor_sum(trans)
    return score


def log_partition(emissions: Tensor, params: CrfParams) -> Tensor:
    """log sum over all L^T paths of exp(path score), numerically stable."""
    t_len, n_labels = emissions.data.shape
    alpha = T.narrow(emissions, 0, 0, 1) + T.reshape(params.start_scores, (1, n_labels))
    for t in range(1, t_len):
        scores = T.reshape(alpha, (n_labels, 1)) + params.transitions \
            + T.narrow(emissions, 0, t, 1)
        alpha = T.reshape(T.logsumexp(scores, axis=0), (1, n_labels))
    return T.logsumexp(alpha + T.reshape(params.end_scores, (1, n_labels)))


def nll_loss(emissions: Tensor, gold_labels, params: CrfParams) -> Tensor:
    """Negative log-likelihood of the gold path; >= 0."""
    return log_partition(emissions, params) - path_score(emissions, gold_labels, params)


def viterbi_decode(emissions, params: CrfParams):
    """Best-scoring label path and its score.

    Ties break toward the lowest label index, both at each backtracking step
    and at the final label.
    """
    e = emissions.data if isinstance(emissions, Tensor) else np.asarray(emissions)
    trans = params.transitions.data
    t_len, n_labels = e.shape
    best = params.start_scores.data + e[0]
    backptr = np.zeros((t_len, n_labels), dtype=np.intp)
    for t in range(1, t_len):
        scores = best[:, None] + trans          # [prev, cur]
        backptr[t] = np.argmax(scores, axis=0)  # argmax takes the first max
        best = scores[backptr[t], np.arange(n_labels)] + e[t]
    best = best + params.end_scores.data
    last = int(np.argmax(best))
    path = [last]
    for t in range(t_len - 1, 0, -1):
        last = int(backptr[t, last])
        path.append(last)
    path.reverse()
    return path, float(np.max(best))


def constrain_iob2(params: CrfParams, scheme: LabelScheme) -> CrfParams:
    """Pin IOB2-invalid transitions to the negative sentinel.

    I-x may only follow B-x or I-x, and no path may start inside a span.
    Returns new params sharing no tensors with the input.
    """
    if not scheme.is_span_task:
        raise ValueError("IOB2 constraints do not apply to the pos scheme")
    labels = scheme.encoded_labels
    trans = params.transitions.data.copy()
    start = params.start_scores.data.copy()
    for j, lab in enumerate(labels):
        if not lab.startswith("I-"):
            continue
        kind = lab[2:]
        allowed = {f"B-{kind}", f"I-{kind}"}
        start[j] = NEG_SENTINEL
        for i, prev in enumerate(labels):
            if prev not in allowed:
                trans[i, j] = NEG_SENTINEL
    grad = params.transitions.requires_grad
    return CrfParams(
        transitions=Tensor(trans, requires_grad=grad),
        start_scores=Tensor(start, requires_grad=grad),
        end_scores=Tensor(params.end_scores.data.copy(), requires_grad=grad),
    )


def iob2_pin_mask(scheme: LabelScheme) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks (transitions, start) of the entries constrain_iob2 pins."""
    labels = scheme.encoded_labels
    n = len(labels)
    trans_mask = np.zeros((n, n), dtype=bool)
    start_mask = np.zeros(n, dtype=bool)
    for j, lab in enumerate(labels):
        if not lab.startswith("I-"):
            continue
        kind = lab[2:]
        allowed = {f"B-{kind}", f"I-{kind}"}
        start_mask[j] = True
        for i, prev in enumerate(labels):
            if prev not in allowed:
                trans_mask[i, j] = True
    return trans_mask, start_mask


def repin(params: CrfParams, scheme: LabelScheme):
    """Re-apply the IOB2 sentinel in place after a parameter update."""
    trans_mask, start_mask = iob2_pin_mask(scheme)
    params.transitions.data[trans_mask] = NEG_SENTINEL
    params.start_scores.data[start_mask] = NEG_SENTINEL
