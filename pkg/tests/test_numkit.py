import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import ContractError, ShapeError
from numkit import ops
from numkit.functional import softmax, suffix_logsumexp
from numkit.gradcheck import finite_diff_check, finite_diff_errors, value_and_grad
from numkit.init import glorot_bound, glorot_uniform
from numkit.optim import AdamState, adam_step
from numkit.sparse import as_sparse, spmm
from numkit.tape import Tape, backward


def is_canonical(a):
    """Зсуви рядків не спадають, індекси в рядку строго зростають, значення скінченні."""
    if np.any(np.diff(a.indptr) < 0):
        return False
    for row in range(a.shape[0]):
        if np.any(np.diff(a.indices[a.indptr[row]:a.indptr[row + 1]]) <= 0):
            return False
    return bool(np.all(np.isfinite(a.data)))


def random_sparse(rng, n, m, density=0.3):
    dense = rng.standard_normal((n, m)) * (rng.random((n, m)) < density)
    return as_sparse(dense), dense


class TestSpmm:
    def test_identity(self):
        x = np.arange(6.0).reshape(3, 2)
        assert np.array_equal(spmm(as_sparse(np.eye(3)), x), x)

    def test_zero(self):
        x = np.ones((3, 4))
        assert np.array_equal(spmm(as_sparse(np.zeros((3, 3))), x), np.zeros((3, 4)))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2 ** 16), n=st.integers(1, 16), m=st.integers(1, 16),
           d=st.integers(1, 5))
    def test_matches_dense_product(self, seed, n, m, d):
        rng = np.random.default_rng(seed)
        a, dense = random_sparse(rng, n, m)
        x = rng.standard_normal((m, d))
        np.testing.assert_allclose(spmm(a, x), dense @ x, rtol=0, atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            spmm(as_sparse(np.eye(3)), np.ones((4, 2)))

    def test_as_sparse_sums_duplicates(self):
        coo = sp.coo_matrix(([1.0, 2.0, 5.0], ([0, 0, 1], [1, 1, 0])), shape=(2, 2))
        csr = as_sparse(coo)
        assert is_canonical(csr)
        assert csr[0, 1] == 3.0
        assert csr.nnz == 2

    def test_as_sparse_rejects_non_finite(self):
        with pytest.raises(ContractError):
            as_sparse(np.array([[np.inf, 0.0]]))


class TestSoftmax:
    def test_uniform(self):
        np.testing.assert_allclose(softmax(np.zeros(4)), np.full(4, 0.25), atol=1e-15)

    def test_two_to_one(self):
        np.testing.assert_allclose(softmax([np.log(2.0), 0.0]), [2 / 3, 1 / 3], atol=1e-12)

    @given(values=st.lists(st.floats(-50, 50), min_size=1, max_size=10),
           shift=st.floats(-100, 100))
    def test_shift_invariance_and_simplex(self, values, shift):
        base = softmax(values)
        assert abs(base.sum() - 1.0) <= 1e-12
        assert np.all(base > 0)
        np.testing.assert_allclose(softmax(np.array(values) + shift), base, atol=1e-12)

    def test_empty(self):
        with pytest.raises(ContractError):
            softmax([])

    def test_non_finite(self):
        with pytest.raises(ContractError):
            softmax([1.0, np.nan])


def test_suffix_logsumexp_matches_brute_force():
    x = np.array([0.3, -1.2, 2.5, 0.0, 700.0])
    expected = [np.log(np.sum(np.exp(x[i:] - 700.0))) + 700.0 for i in range(x.size)]
    np.testing.assert_allclose(suffix_logsumexp(x), expected, rtol=1e-12)


class TestTape:
    def test_sum_gradient_is_ones(self):
        tape = Tape()
        w = tape.parameter("W", np.arange(4.0).reshape(2, 2))
        grads = backward(tape, ops.sum_all(w))
        assert np.array_equal(grads["W"], np.ones((2, 2)))

    def test_half_square_norm_gradient_is_w(self):
        value = np.array([[1.0, -2.0], [0.5, 3.0]])
        tape = Tape()
        w = tape.parameter("W", value)
        grads = backward(tape, ops.scale(ops.sum_all(w * w), 0.5))
        np.testing.assert_allclose(grads["W"], value)

    def test_unused_parameter_gets_zero_gradient(self):
        tape = Tape()
        w = tape.parameter("W", np.ones((2, 2)))
        tape.parameter("unused", np.ones((3, 1)))
        grads = backward(tape, ops.sum_all(w))
        assert np.array_equal(grads["unused"], np.zeros((3, 1)))

    def test_non_scalar_loss(self):
        tape = Tape()
        w = tape.parameter("W", np.ones((2, 2)))
        with pytest.raises(ContractError):
            backward(tape, w)

    def test_unmarked_loss(self):
        tape = Tape()
        tape.parameter("W", np.ones((1, 1)))
        with pytest.raises(ContractError):
            backward(tape)

    def test_foreign_node(self):
        a, b = Tape(), Tape()
        x = a.parameter("x", np.ones((1, 1)))
        y = b.parameter("y", np.ones((1, 1)))
        with pytest.raises(ContractError):
            ops.add(x, y)

    def test_duplicate_parameter(self):
        tape = Tape()
        tape.parameter("W", np.ones((1, 1)))
        with pytest.raises(ContractError):
            tape.parameter("W", np.ones((1, 1)))

    def test_topological_order(self):
        tape = Tape()
        x = tape.parameter("x", np.ones((2, 2)))
        ops.sum_all(ops.tanh(x @ x))
        for node in tape.nodes:
            assert all(i < node.id for i in node.inputs)

    def test_broadcast_bias_gradient_sums_rows(self):
        tape = Tape()
        x = tape.constant(np.arange(6.0).reshape(3, 2))
        bias = tape.parameter("b", np.zeros((1, 2)))
        grads = backward(tape, ops.sum_all(x + bias))
        np.testing.assert_allclose(grads["b"], [[3.0, 3.0]])

    def test_matmul_shape_mismatch(self):
        tape = Tape()
        with pytest.raises(ShapeError):
            tape.constant(np.ones((2, 3))) @ tape.constant(np.ones((2, 3)))


RNG = np.random.default_rng(0)
PARAMS = {
    "A": RNG.standard_normal((3, 2)),
    "B": RNG.standard_normal((2, 3)),
    "C": RNG.standard_normal((3, 2)),
    "bias": RNG.standard_normal((1, 2)),
}
WEIGHTS = RNG.standard_normal((3, 3))
COLUMN = RNG.standard_normal((3, 1))
ADJACENCY = as_sparse(np.array([[0.5, 0.5, 0.0], [0.5, 1 / 3, 0.2], [0.0, 0.2, 0.8]]))

PRIMITIVE_LOSSES = {
    "matmul-tanh": lambda t, n: ops.sum_all(ops.tanh(n["A"] @ n["B"])),
    "sigmoid-mul": lambda t, n: ops.sum_all(ops.sigmoid(n["A"]) * n["C"]),
    "relu-broadcast": lambda t, n: ops.sum_all(ops.relu(n["A"] + n["bias"]) * n["C"]),
    "softmax": lambda t, n: ops.sum_all(ops.softmax(n["A"] @ n["B"]) * t.constant(WEIGHTS)),
    "concat-rows-cols": lambda t, n: ops.sum_all(ops.tanh(
        ops.cols(ops.rows(ops.concat([n["A"], n["C"]]), [2, 0, 2]), [3, 1])
    )),
    "log": lambda t, n: ops.sum_all(ops.log(ops.sigmoid(n["A"]))),
    "suffix-logsumexp": lambda t, n: ops.sum_all(
        ops.suffix_logsumexp(ops.cols(n["A"], [0])) * t.constant(COLUMN)
    ),
    "spmm": lambda t, n: ops.sum_all(ops.tanh(ops.spmm(ADJACENCY, n["A"]))),
    "sub-scale-mean": lambda t, n: ops.mean_all(ops.scale(n["A"] - n["C"], 2.0) * (n["A"] - n["C"])),
}


@pytest.mark.parametrize("name", sorted(PRIMITIVE_LOSSES))
def test_primitive_gradients_match_finite_differences(name):
    assert finite_diff_check(PARAMS, PRIMITIVE_LOSSES[name]) < 1e-6


class TestFiniteDifferences:
    def test_square(self):
        error = finite_diff_check({"x": np.array([[3.0]])}, lambda t, n: n["x"] * n["x"])
        assert error < 1e-9
        _, grads = value_and_grad({"x": np.array([[3.0]])}, lambda t, n: n["x"] * n["x"])
        assert grads["x"][0, 0] == pytest.approx(6.0)

    def test_tanh(self):
        assert finite_diff_check({"x": np.array([[0.5]])}, lambda t, n: ops.tanh(n["x"])) < 1e-8

    def test_corrupted_gradient_is_named(self):
        def corrupt(grads):
            return {**grads, "B": grads["B"] + 1.0}

        errors = finite_diff_errors(PARAMS, PRIMITIVE_LOSSES["matmul-tanh"], grad_hook=corrupt)
        assert errors["B"] > 1e-2
        assert errors["A"] < 1e-6

    def test_eps_must_be_positive(self):
        with pytest.raises(ContractError):
            finite_diff_errors({"x": np.ones((1, 1))}, lambda t, n: n["x"], eps=0.0)


class TestAdam:
    def test_zero_gradient_keeps_params(self):
        params = {"w": np.array([[1.0, -2.0]])}
        new, state = adam_step(params, {"w": np.zeros((1, 2))}, AdamState.zeros_like(params), 0.1)
        assert np.array_equal(new["w"], params["w"])
        assert np.array_equal(state.first_moment["w"], np.zeros((1, 2)))
        assert np.array_equal(state.second_moment["w"], np.zeros((1, 2)))
        assert state.step == 1

    def test_first_step_moves_by_learning_rate(self):
        params = {"w": np.array([[0.0]])}
        new, _ = adam_step(params, {"w": np.array([[1.0]])}, AdamState.zeros_like(params), 0.001)
        assert new["w"][0, 0] == pytest.approx(-0.001, abs=1e-10)

    def test_deterministic_and_pure(self):
        rng = np.random.default_rng(1)
        params = {"a": rng.standard_normal((3, 2)), "b": rng.standard_normal((1, 2))}
        grads = {name: rng.standard_normal(value.shape) for name, value in params.items()}
        snapshot = {name: value.copy() for name, value in params.items()}
        state = AdamState.zeros_like(params)
        first = adam_step(params, grads, state, 0.01)
        second = adam_step(params, grads, state, 0.01)
        for name in params:
            assert np.array_equal(first[0][name], second[0][name])
            assert np.array_equal(params[name], snapshot[name])
        assert state.step == 0

    def test_zero_learning_rate(self):
        params = {"w": np.array([[0.3]])}
        new, _ = adam_step(params, {"w": np.array([[5.0]])}, AdamState.zeros_like(params), 0.0)
        assert np.array_equal(new["w"], params["w"])

    def test_negative_learning_rate(self):
        params = {"w": np.zeros((1, 1))}
        with pytest.raises(ContractError):
            adam_step(params, {"w": np.zeros((1, 1))}, AdamState.zeros_like(params), -0.1)

    def test_shape_mismatch(self):
        params = {"w": np.zeros((1, 2))}
        with pytest.raises(ShapeError):
            adam_step(params, {"w": np.zeros((2, 1))}, AdamState.zeros_like(params), 0.1)


def test_glorot_bounds():
    assert glorot_bound(3, 3) == pytest.approx(1.0)
    weights = glorot_uniform(np.random.default_rng(0), 67, 128)
    assert weights.shape == (67, 128)
    assert np.all(np.abs(weights) <= glorot_bound(67, 128))
