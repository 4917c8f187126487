import math

import numpy as np
import pytest

from seqlab import tensor as T
from seqlab.rng import Rng
from seqlab.tensor import (
    GradCheckReport,
    ShapeError,
    Tensor,
    backward,
    check_gradients,
    concat,
    gather_rows,
    logsumexp,
    matmul,
    max_over_axis,
    narrow,
    take_flat,
)


def scalar_loop_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Independent O(mnk) oracle for the matrix product."""
    m, k = a.shape
    k2, n = b.shape
    assert k == k2
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            acc = 0.0
            for p in range(k):
                acc += a[i, p] * b[p, j]
            out[i, j] = acc
    return out


def rand(rng, shape, lo=-2.0, hi=2.0):
    return rng.uniform_array(shape, lo, hi)


# -- matmul -------------------------------------------------------------


def test_matmul_identity():
    m = Tensor([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    eye = Tensor(np.eye(3))
    assert np.array_equal(matmul(eye, m).data, m.data)


def test_matmul_hand_example():
    out = matmul(Tensor([[1.0, 2.0], [3.0, 4.0]]), Tensor([[1.0], [1.0]]))
    assert np.array_equal(out.data, [[3.0], [7.0]])


def test_matmul_against_scalar_loop_oracle():
    rng = Rng(11)
    a = rand(rng, (5, 7))
    b = rand(rng, (7, 2))
    got = matmul(Tensor(a), Tensor(b)).data
    want = scalar_loop_matmul(a, b)
    assert np.max(np.abs(got - want)) <= 1e-10


def test_matmul_shape_mismatch_names_both_shapes():
    with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 3\)"):
        matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))


def test_matmul_associativity_on_well_conditioned_triples():
    rng = Rng(21)
    for _ in range(10):
        a, b, c = rand(rng, (4, 5), -1, 1), rand(rng, (5, 6), -1, 1), rand(rng, (6, 3), -1, 1)
        left = matmul(matmul(Tensor(a), Tensor(b)), Tensor(c)).data
        right = matmul(Tensor(a), matmul(Tensor(b), Tensor(c))).data
        denom = np.maximum(np.abs(left), 1.0)
        assert np.max(np.abs(left - right) / denom) <= 1e-8


# -- elementwise and reductions ----------------------------------------


def test_logsumexp_symmetric_case():
    out = logsumexp(Tensor([0.0, 0.0]))
    assert out.item() == pytest.approx(math.log(2.0), abs=1e-12)


def test_sigmoid_tanh_fixed_points():
    assert T.sigmoid(Tensor(0.0)).item() == 0.5
    assert T.tanh(Tensor(0.0)).item() == 0.0


def test_sigmoid_stable_for_large_inputs():
    assert T.sigmoid(Tensor(800.0)).item() == pytest.approx(1.0)
    assert T.sigmoid(Tensor(-800.0)).item() == pytest.approx(0.0, abs=1e-300)


def test_max_over_axis_constant_routes_grad_to_first_index():
    x = Tensor(np.full((4,), 2.5), requires_grad=True)
    out = max_over_axis(x, 0)
    assert out.item() == 2.5
    backward(out)
    assert np.array_equal(x.grad, [1.0, 0.0, 0.0, 0.0])


def test_max_over_axis_invalid_axis():
    with pytest.raises(ShapeError):
        max_over_axis(Tensor(np.zeros((2, 2))), 5)


def test_logsumexp_shift_invariance_is_exact():
    rng = Rng(3)
    x = rand(rng, (6,), -3, 3)
    for c in (-5.0, 0.125, 700.0):
        lhs = logsumexp(Tensor(x + c)).item()
        rhs = logsumexp(Tensor(x)).item() + c
        assert abs(lhs - rhs) <= 1e-10


def test_logsumexp_no_overflow_for_huge_inputs():
    out = logsumexp(Tensor([500.0, -200.0]))
    assert np.isfinite(out.item())
    big = logsumexp(Tensor([1000.0, 1000.0]))
    assert big.item() == pytest.approx(1000.0 + math.log(2.0))


def test_concat_and_narrow_roundtrip():
    a = Tensor(np.arange(6.0).reshape(2, 3))
    b = Tensor(np.arange(6.0, 12.0).reshape(2, 3))
    cat = concat([a, b], axis=0)
    assert cat.shape == (4, 3)
    assert np.array_equal(narrow(cat, 0, 2, 2).data, b.data)


def test_gather_rows_and_scatter_gradient():
    m = Tensor(np.arange(12.0).reshape(4, 3), requires_grad=True)
    out = gather_rows(m, [1, 1, 3])
    assert np.array_equal(out.data, m.data[[1, 1, 3]])
    backward(T.tensor_sum(out))
    want = np.zeros((4, 3))
    want[1] = 2.0
    want[3] = 1.0
    assert np.array_equal(m.grad, want)


def test_take_flat_gradient_accumulates_duplicates():
    x = Tensor(np.arange(6.0).reshape(2, 3), requires_grad=True)
    out = take_flat(x, [0, 0, 5])
    assert np.array_equal(out.data, [0.0, 0.0, 5.0])
    backward(T.tensor_sum(out))
    assert np.array_equal(x.grad, [[2.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


# -- backward ------------------------------------------------------------


def test_backward_sum_gives_ones():
    x = Tensor(np.zeros((3, 4)), requires_grad=True)
    backward(T.tensor_sum(x))
    assert np.array_equal(x.grad, np.ones((3, 4)))


def test_backward_sum_of_squares():
    x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
    backward(T.tensor_sum(x * x))
    assert np.array_equal(x.grad, [2.0, 4.0, 6.0])


def test_backward_rejects_non_scalar_loss():
    x = Tensor([1.0, 2.0], requires_grad=True)
    with pytest.raises(ShapeError):
        backward(x * x)


def test_backward_accumulates_until_zeroed():
    x = Tensor([1.0, 2.0], requires_grad=True)
    backward(T.tensor_sum(x * x))
    backward(T.tensor_sum(x * x))
    assert np.array_equal(x.grad, [4.0, 8.0])
    x.zero_grad()
    backward(T.tensor_sum(x * x))
    assert np.array_equal(x.grad, [2.0, 4.0])


def test_shared_subexpression_fan_out_gradient():
    # z = x + y and w = 2x share x; gradients must not cross-contaminate
    x = Tensor([1.0, 1.0], requires_grad=True)
    y = Tensor([1.0, 1.0], requires_grad=True)
    loss = T.tensor_sum(x + y) + T.tensor_sum(x * 2.0)
    backward(loss)
    assert np.array_equal(x.grad, [3.0, 3.0])
    assert np.array_equal(y.grad, [1.0, 1.0])


def _random_composite(rng):
    """A little graph exercising every differentiable op once."""
    a = Tensor(rand(rng, (3, 4)), requires_grad=True)
    b = Tensor(rand(rng, (4, 2)), requires_grad=True)
    c = Tensor(rand(rng, (3, 2)), requires_grad=True)
    d = Tensor(rand(rng, (1, 2)), requires_grad=True)
    params = [a, b, c, d]

    def f():
        h = matmul(T.tanh(a), b)
        h = T.sigmoid(h + c) * c + d
        h = concat([h, T.relu(h)], axis=1)
        h = narrow(h, 1, 1, 2)
        picked = take_flat(h, [0, 3, 5])
        pooled = max_over_axis(h, 0)
        return logsumexp(h) + T.tensor_sum(pooled) + T.tensor_sum(picked)

    return f, params


def test_composite_graphs_match_finite_differences():
    for seed in range(100):
        f, params = _random_composite(Rng(seed))
        report = check_gradients(f, params)
        assert report.nan_count == 0
        assert report.max_error <= 1e-4, f"seed {seed}: {report.per_param}"


# -- check_gradients ------------------------------------------------------


def test_check_gradients_quadratic_form():
    rng = Rng(42)
    a = rand(rng, (4, 4))
    x = Tensor(rand(rng, (4, 1)), requires_grad=True)

    def f():
        return T.tensor_sum(matmul(matmul(reshape_t(x), Tensor(a)), x))

    def reshape_t(t):
        return T.reshape(t, (1, 4))

    report = check_gradients(f, [x])
    assert report.max_error <= 1e-8


def test_check_gradients_zero_function():
    x = Tensor([1.0, -2.0], requires_grad=True)

    def f():
        return T.tensor_sum(x * 0.0)

    report = check_gradients(f, [x])
    assert report.per_param == [0.0]
    assert isinstance(report, GradCheckReport)
