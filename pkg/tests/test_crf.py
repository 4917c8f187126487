import itertools
import math

import numpy as np
import pytest

from seqlab.crf import (
    NEG_SENTINEL,
    CrfParams,
    constrain_iob2,
    log_partition,
    nll_loss,
    path_score,
    viterbi_decode,
    zero_crf,
)
from seqlab.data import CHUNK_SCHEME, NER_SCHEME, POS_SCHEME
from seqlab.rng import Rng
from seqlab.tensor import Tensor, check_gradients


def random_instance(rng, t_len, n_labels, lo=-2.0, hi=2.0):
    e = rng.uniform_array((t_len, n_labels), lo, hi)
    params = CrfParams(
        transitions=Tensor(rng.uniform_array((n_labels, n_labels), lo, hi)),
        start_scores=Tensor(rng.uniform_array((n_labels,), lo, hi)),
        end_scores=Tensor(rng.uniform_array((n_labels,), lo, hi)),
    )
    return Tensor(e), params


def enumerate_path_scores(e, params):
    """Score every one of the L^T paths by explicit summation.

    Additions follow the same left-to-right association as the recurrences
    so that score comparisons can be exact.
    """
    em = e.data
    trans = params.transitions.data
    start = params.start_scores.data
    end = params.end_scores.data
    t_len, n_labels = em.shape
    scores = {}
    for path in itertools.product(range(n_labels), repeat=t_len):
        s = start[path[0]] + em[0, path[0]]
        for t in range(1, t_len):
            s = s + trans[path[t - 1], path[t]]
            s = s + em[t, path[t]]
        s = s + end[path[-1]]
        scores[path] = s
    return scores


def brute_logsumexp(values):
    m = max(values)
    return m + math.log(sum(math.exp(v - m) for v in values))


# -- path_score -----------------------------------------------------------


def test_path_score_single_token_zero_params():
    e = Tensor([[1.5, -0.5, 2.0]])
    params = zero_crf(3, trainable=False)
    for y in range(3):
        assert path_score(e, [y], params).item() == e.data[0, y]


def test_path_score_all_zeros():
    e = Tensor(np.zeros((3, 2)))
    params = zero_crf(2, trainable=False)
    for path in itertools.product(range(2), repeat=3):
        assert path_score(e, list(path), params).item() == 0.0


def test_path_score_matches_summation_oracle_exactly():
    e, params = random_instance(Rng(17), 4, 3)
    oracle = enumerate_path_scores(e, params)
    for path, want in oracle.items():
        assert path_score(e, list(path), params).item() == want


def test_path_score_length_mismatch():
    e = Tensor(np.zeros((3, 2)))
    with pytest.raises(ValueError, match="labels"):
        path_score(e, [0, 1], zero_crf(2))


def test_path_score_invalid_label_index():
    e = Tensor(np.zeros((2, 2)))
    with pytest.raises(ValueError, match="out of range"):
        path_score(e, [0, 5], zero_crf(2))


# -- log_partition ----------------------------------------------------------


def test_log_partition_single_token_two_labels():
    e = Tensor([[0.0, 0.0]])
    assert log_partition(e, zero_crf(2)).item() == pytest.approx(math.log(2), abs=1e-12)


def test_log_partition_two_tokens_all_zero():
    e = Tensor(np.zeros((2, 2)))
    assert log_partition(e, zero_crf(2)).item() == pytest.approx(math.log(4), abs=1e-12)


def test_log_partition_matches_enumeration():
    e, params = random_instance(Rng(23), 4, 3)
    want = brute_logsumexp(list(enumerate_path_scores(e, params).values()))
    assert abs(log_partition(e, params).item() - want) <= 1e-9


def test_path_probabilities_sum_to_one():
    for seed in range(5):
        rng = Rng(seed)
        t_len = rng.randint(1, 5)
        n_labels = rng.randint(2, 4)
        e, params = random_instance(rng, t_len, n_labels)
        log_z = log_partition(e, params).item()
        total = sum(
            math.exp(s - log_z) for s in enumerate_path_scores(e, params).values()
        )
        assert abs(total - 1.0) <= 1e-9


# -- nll_loss ----------------------------------------------------------------


def test_nll_saturated_gold_is_zero():
    gold = [0, 2, 1, 0]
    e = np.zeros((4, 3))
    for t, y in enumerate(gold):
        e[t, y] = 50.0
    loss = nll_loss(Tensor(e), gold, zero_crf(3))
    assert 0.0 <= loss.item() <= 1e-15


def test_nll_uniform_model_is_t_log_l():
    t_len, n_labels = 5, 4
    loss = nll_loss(Tensor(np.zeros((t_len, n_labels))), [0] * t_len, zero_crf(n_labels))
    assert loss.item() == pytest.approx(t_len * math.log(n_labels), abs=1e-9)


def test_nll_nonnegative_on_random_instances():
    for seed in range(20):
        rng = Rng(seed + 100)
        e, params = random_instance(rng, rng.randint(1, 5), 3)
        gold = [rng.below(3) for _ in range(e.data.shape[0])]
        assert nll_loss(e, gold, params).item() >= -1e-9


def test_nll_gradient_matches_finite_differences():
    rng = Rng(7)
    e = Tensor(rng.uniform_array((3, 3), -1, 1), requires_grad=True)
    params = CrfParams(
        transitions=Tensor(rng.uniform_array((3, 3), -1, 1), requires_grad=True),
        start_scores=Tensor(rng.uniform_array((3,), -1, 1), requires_grad=True),
        end_scores=Tensor(rng.uniform_array((3,), -1, 1), requires_grad=True),
    )
    report = check_gradients(
        lambda: nll_loss(e, [0, 2, 1], params), [e] + params.tensors()
    )
    assert report.max_error <= 1e-4


# -- viterbi -----------------------------------------------------------------


def test_viterbi_single_token():
    e = Tensor([[0.5, 3.0, -1.0]])
    params = CrfParams(
        transitions=Tensor(np.zeros((3, 3))),
        start_scores=Tensor([1.0, 0.0, 0.0]),
        end_scores=Tensor([0.0, 0.0, 5.0]),
    )
    path, score = viterbi_decode(e, params)
    assert path == [2]
    assert score == pytest.approx(-1.0 + 5.0)


def test_viterbi_all_zero_instance_breaks_ties_low():
    e = Tensor(np.zeros((4, 3)))
    path, score = viterbi_decode(e, zero_crf(3))
    assert path == [0, 0, 0, 0]
    assert score == 0.0


def test_viterbi_matches_enumeration():
    e, params = random_instance(Rng(31), 5, 4)
    scores = enumerate_path_scores(e, params)
    best_path = max(scores, key=lambda p: scores[p])
    path, score = viterbi_decode(e, params)
    assert score == max(scores.values())
    assert tuple(path) == best_path
    assert score <= log_partition(e, params).item() + 1e-9


def test_emission_shift_moves_all_scores_and_keeps_argmax():
    e, params = random_instance(Rng(57), 4, 3)
    base_path, base_score = viterbi_decode(e, params)
    base_z = log_partition(e, params).item()
    shifted = e.data.copy()
    shifted[2] += 3.75
    e2 = Tensor(shifted)
    path2, score2 = viterbi_decode(e2, params)
    assert path2 == base_path
    assert score2 == pytest.approx(base_score + 3.75, abs=1e-9)
    assert log_partition(e2, params).item() == pytest.approx(base_z + 3.75, abs=1e-9)
    assert path_score(e2, base_path, params).item() == pytest.approx(
        path_score(e, base_path, params).item() + 3.75, abs=1e-9
    )


# -- IOB2 constraints ----------------------------------------------------------


def test_constrain_pins_invalid_transitions():
    params = zero_crf(len(NER_SCHEME), trainable=False)
    constrained = constrain_iob2(params, NER_SCHEME)
    idx = NER_SCHEME.index
    assert constrained.transitions.data[idx("O"), idx("I-PER")] == NEG_SENTINEL
    assert constrained.transitions.data[idx("B-LOC"), idx("I-PER")] == NEG_SENTINEL
    assert constrained.transitions.data[idx("B-PER"), idx("I-PER")] == 0.0
    assert constrained.transitions.data[idx("I-PER"), idx("I-PER")] == 0.0
    assert constrained.start_scores.data[idx("I-ORG")] == NEG_SENTINEL
    assert constrained.start_scores.data[idx("B-ORG")] == 0.0
    # original untouched
    assert params.transitions.data[idx("O"), idx("I-PER")] == 0.0


def test_constrain_rejects_pos_scheme():
    with pytest.raises(ValueError):
        constrain_iob2(zero_crf(len(POS_SCHEME)), POS_SCHEME)


def _is_valid_iob2(labels):
    prev = "O"
    for lab in labels:
        if lab.startswith("I-"):
            if prev not in (f"B-{lab[2:]}", f"I-{lab[2:]}"):
                return False
        prev = lab
    return True


@pytest.mark.parametrize("scheme", [CHUNK_SCHEME, NER_SCHEME])
def test_constrained_decoding_is_always_iob2_valid(scheme):
    rng = Rng(5)
    n_labels = len(scheme)
    params = CrfParams(
        transitions=Tensor(rng.uniform_array((n_labels, n_labels), -1, 1)),
        start_scores=Tensor(rng.uniform_array((n_labels,), -1, 1)),
        end_scores=Tensor(rng.uniform_array((n_labels,), -1, 1)),
    )
    constrained = constrain_iob2(params, scheme)
    for _ in range(500):
        t_len = rng.randint(1, 6)
        e = Tensor(rng.uniform_array((t_len, n_labels), -3, 3))
        path, _ = viterbi_decode(e, constrained)
        labels = [scheme.label(i) for i in path]
        assert _is_valid_iob2(labels), labels
