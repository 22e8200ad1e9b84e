import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from core.errors import ContractError, DataError, ShapeError
from experiments.commands import gradcheck_network
from model.checkpoint import Checkpoint, decode, encode, load_checkpoint, save_checkpoint
from model.influencer_rank import bind, forward, predict
from model.layers import attention_pool, attention_weights, gcn_forward, gru_step, score
from model.params import ModelVariant, init_params, param_shapes
from numkit.gradcheck import finite_diff_errors
from numkit.init import glorot_bound
from numkit.sparse import as_sparse
from numkit.tape import Tape, backward
from trainer.loss import listmle_loss


def nodes_for(params):
    tape = Tape()
    return tape, bind(tape, params)


class TestParams:
    def test_deterministic(self, tiny_model_config):
        first = init_params(tiny_model_config)
        second = init_params(tiny_model_config)
        assert all(np.array_equal(first[name], second[name]) for name in first)

    def test_shared_across_variants(self, tiny_model_config):
        full = init_params(tiny_model_config)
        no_rnn = init_params(tiny_model_config, ModelVariant.NO_RNN)
        assert set(full) == set(no_rnn)
        assert all(np.array_equal(full[name], no_rnn[name]) for name in full)

    def test_bounds(self, tiny_model_config):
        for name, value in init_params(tiny_model_config).items():
            if "_b" in name:
                assert not value.any()
            else:
                assert np.all(np.abs(value) <= glorot_bound(*value.shape))

    def test_variant_shapes(self, tiny_model_config):
        no_gcn = param_shapes(tiny_model_config, ModelVariant.NO_GCN)
        assert not any(name.startswith("gcn_") for name in no_gcn)
        assert no_gcn["gru_Wz"] == (4 + 4, 4)
        assert param_shapes(tiny_model_config)["gru_Wz"] == (4 + 2 * 3, 4)
        assert "att_w" not in param_shapes(tiny_model_config, ModelVariant.NO_ATTENTION)

    def test_attention_is_single_projection(self, tiny_model_config):
        shapes = param_shapes(tiny_model_config)
        assert shapes["att_w"] == (4, 1)
        assert shapes["att_b"] == (1, 1)
        assert not any(name.startswith("att_") for name in set(shapes) - {"att_w", "att_b"})
        assert "mlp_bc" not in shapes

    def test_parse_variant(self):
        assert ModelVariant.parse("no-gcn") is ModelVariant.NO_GCN
        with pytest.raises(ContractError):
            ModelVariant.parse("no-everything")


class TestGcn:
    def test_output_width(self, tiny_network, tiny_model_config):
        _, params = nodes_for(init_params(tiny_model_config))
        tape = params["W_in"].tape
        out = gcn_forward(tape.constant(tiny_network.features[0]), tiny_network.adjacency[0], params)
        assert out.shape == (tiny_network.n_nodes, 2 * 3)
        assert np.all(out.value >= 0)

    def test_permutation_equivariance(self, tiny_model_config):
        rng = np.random.default_rng(5)
        n = 6
        binary = np.triu(rng.random((n, n)) < 0.4, 1).astype(float)
        binary = binary + binary.T + np.eye(n)
        degree = binary.sum(axis=1)
        adjacency = binary / np.sqrt(np.outer(degree, degree))
        x = rng.standard_normal((n, 67))
        perm = rng.permutation(n)

        values = init_params(tiny_model_config)
        tape, params = nodes_for(values)
        base = gcn_forward(tape.constant(x), as_sparse(adjacency), params).value
        tape, params = nodes_for(values)
        permuted = gcn_forward(tape.constant(x[perm]),
                               as_sparse(adjacency[np.ix_(perm, perm)]), params).value
        np.testing.assert_allclose(permuted, base[perm], atol=1e-12)

    def test_adjacency_shape_mismatch(self, tiny_model_config):
        tape, params = nodes_for(init_params(tiny_model_config))
        with pytest.raises(ShapeError):
            gcn_forward(tape.constant(np.zeros((3, 67))), as_sparse(np.eye(4)), params)


class TestGru:
    def setup_state(self, tiny_model_config, overrides):
        values = {**init_params(tiny_model_config), **overrides}
        tape, params = nodes_for(values)
        rng = np.random.default_rng(2)
        h_prev = tape.constant(np.tanh(rng.standard_normal((5, 4))))
        r_t = tape.constant(rng.standard_normal((5, 6)))
        return h_prev, r_t, params

    def test_closed_update_gate_keeps_state(self, tiny_model_config):
        h_prev, r_t, params = self.setup_state(tiny_model_config,
                                               {"gru_bz": np.full((1, 4), -60.0)})
        np.testing.assert_allclose(gru_step(h_prev, r_t, params).value, h_prev.value, atol=1e-12)

    def test_open_update_gate_takes_candidate(self, tiny_model_config):
        h_prev, r_t, params = self.setup_state(tiny_model_config,
                                               {"gru_bz": np.full((1, 4), 60.0)})
        h, r = h_prev.value, r_t.value
        stacked = np.hstack([h, r])
        reset = 1.0 / (1.0 + np.exp(-(stacked @ params["gru_Wr"].value + params["gru_br"].value)))
        candidate = np.tanh(np.hstack([reset * h, r]) @ params["gru_Wh"].value
                            + params["gru_bh"].value)
        np.testing.assert_allclose(gru_step(h_prev, r_t, params).value, candidate, atol=1e-12)

    @pytest.mark.parametrize("bz", [-3.0, 0.0, 2.5])
    def test_candidate_equal_to_state_is_fixed_point(self, tiny_model_config, bz):
        bias = np.array([[0.3, -0.7, 1.1, 0.0]])
        h_prev, r_t, params = self.setup_state(tiny_model_config, {
            "gru_Wh": np.zeros((4 + 6, 4)), "gru_bh": bias, "gru_bz": np.full((1, 4), bz),
        })
        fixed = h_prev.tape.constant(np.tanh(bias).repeat(5, axis=0))
        np.testing.assert_allclose(gru_step(fixed, r_t, params).value, fixed.value, atol=1e-14)

    def test_zero_weights_from_zero_state(self, tiny_model_config):
        zeros = {name: np.zeros(shape) for name, shape in param_shapes(tiny_model_config).items()
                 if name.startswith("gru_")}
        h_prev, r_t, params = self.setup_state(tiny_model_config, zeros)
        h0 = h_prev.tape.constant(np.zeros((5, 4)))
        assert not gru_step(h0, r_t, params).value.any()

    def test_state_stays_bounded(self, tiny_model_config):
        h_prev, r_t, params = self.setup_state(tiny_model_config, {})
        state = h_prev
        for _ in range(5):
            state = gru_step(state, r_t, params)
            assert np.all(np.abs(state.value) <= 1.0)

    def test_row_mismatch(self, tiny_model_config):
        h_prev, r_t, params = self.setup_state(tiny_model_config, {})
        with pytest.raises(ShapeError):
            gru_step(h_prev, r_t.tape.constant(np.zeros((4, 6))), params)


class TestAttention:
    def states(self, tiny_model_config, k):
        tape, params = nodes_for(init_params(tiny_model_config))
        rng = np.random.default_rng(4)
        return [tape.constant(np.tanh(rng.standard_normal((5, 4)))) for _ in range(k)], params

    def test_single_step(self, tiny_model_config):
        states, params = self.states(tiny_model_config, 1)
        alpha, pooled = attention_pool(states, params)
        assert np.array_equal(alpha.value, np.ones((5, 1)))
        assert np.array_equal(pooled.value, states[0].value)

    def test_weights_on_simplex(self, tiny_model_config):
        states, params = self.states(tiny_model_config, 4)
        alpha, pooled = attention_pool(states, params)
        assert alpha.shape == (5, 4)
        np.testing.assert_allclose(alpha.value.sum(axis=1), np.ones(5), atol=1e-12)
        assert np.all(alpha.value > 0)
        assert pooled.shape == (5, 4)

    def test_uniform(self, tiny_model_config):
        states, params = self.states(tiny_model_config, 4)
        alpha, pooled = attention_pool(states, params, uniform=True)
        assert np.all(alpha.value == 0.25)
        expected = sum(state.value for state in states) / 4
        np.testing.assert_allclose(pooled.value, expected, atol=1e-15)

    def test_empty(self, tiny_model_config):
        _, params = self.states(tiny_model_config, 1)
        with pytest.raises(ContractError):
            attention_pool([], params)

    @given(shift=st.floats(-30, 30))
    def test_shifted_logits_keep_weights(self, shift):
        tape = Tape()
        logits = np.random.default_rng(8).uniform(-1.0, 1.0, size=(5, 4))
        base = attention_weights(tape.constant(logits)).value
        shifted = attention_weights(tape.constant(logits + shift)).value
        np.testing.assert_allclose(shifted, base, atol=1e-12)


def test_score_with_zero_output_weights_is_zero(tiny_model_config):
    values = init_params(tiny_model_config)
    values["mlp_Wc"] = np.zeros_like(values["mlp_Wc"])
    values["mlp_bb"] = np.full_like(values["mlp_bb"], 0.7)
    tape, params = nodes_for(values)
    out = score(tape.constant(np.ones((3, 4))), params)
    assert np.array_equal(out.value, np.zeros((3, 1)))


class TestForward:
    def test_eval_is_deterministic(self, tiny_network, tiny_model_config):
        params = init_params(tiny_model_config)
        first = predict(tiny_network, params)
        assert first.shape == (len(tiny_network.influencer_ids),)
        assert np.array_equal(first, predict(tiny_network, params))

    def test_train_mode_needs_rng(self, tiny_network, tiny_model_config):
        tape, params = nodes_for(init_params(tiny_model_config))
        with pytest.raises(ContractError):
            forward(tiny_network, params, "train")
        with pytest.raises(ContractError):
            forward(tiny_network, params, "predict")

    def test_dropout_only_in_training(self, tiny_network, tiny_model_config):
        values = init_params(tiny_model_config)
        tape, params = nodes_for(values)
        evaluated = forward(tiny_network, params, "eval", np.random.default_rng(0), p=0.5)
        assert np.array_equal(evaluated.value[:, 0], predict(tiny_network, values))
        tape, params = nodes_for(values)
        trained = forward(tiny_network, params, "train", np.random.default_rng(0), p=0.5)
        assert not np.array_equal(trained.value, evaluated.value)

    def test_no_attention_equals_full_for_single_snapshot(self, tiny_network, tiny_model_config):
        params = init_params(tiny_model_config)
        last = tiny_network.truncate(1)
        assert np.array_equal(predict(last, params),
                              predict(last, params, ModelVariant.NO_ATTENTION))

    def test_no_rnn_reads_last_snapshot(self, tiny_network, tiny_model_config):
        params = init_params(tiny_model_config)
        assert np.array_equal(predict(tiny_network, params, ModelVariant.NO_RNN),
                              predict(tiny_network.truncate(1), params))

    def test_no_gcn(self, tiny_network, tiny_model_config):
        params = init_params(tiny_model_config, ModelVariant.NO_GCN)
        assert np.isfinite(predict(tiny_network, params, ModelVariant.NO_GCN)).all()


@pytest.mark.parametrize("variant", list(ModelVariant))
def test_composed_gradients_match_finite_differences(variant, tiny_model_config):
    rng = np.random.default_rng([0, 6])
    net = gradcheck_network(rng)
    params = init_params(tiny_model_config, variant)
    rates = rng.random(len(net.influencer_ids)).tolist()
    ids = list(net.influencer_ids)

    errors = finite_diff_errors(
        params, lambda tape, nodes: listmle_loss(forward(net, nodes, "eval", variant=variant),
                                                 rates, ids)
    )
    assert set(errors) == set(params)
    assert max(errors.values()) < 1e-4


@pytest.mark.parametrize("variant", [
    ModelVariant.FULL, ModelVariant.NO_ATTENTION, ModelVariant.NO_GCN,
])
def test_every_parameter_receives_gradient(variant, tiny_model_config):
    params = init_params(tiny_model_config, variant)
    alive = set()
    for seed in range(3):
        rng = np.random.default_rng([seed, 6])
        net = gradcheck_network(rng)
        rates = rng.random(len(net.influencer_ids)).tolist()
        tape, nodes = nodes_for(params)
        loss = listmle_loss(forward(net, nodes, "eval", variant=variant), rates,
                            list(net.influencer_ids))
        grads = backward(tape, loss)
        alive |= {name for name, grad in grads.items() if np.any(grad != 0.0)}
    assert alive == set(params)


class TestCheckpoint:
    def make(self, tiny_model_config):
        return Checkpoint(init_params(tiny_model_config), tiny_model_config,
                          metadata={"seed": 0, "window_length": 2})

    def test_round_trip_is_exact(self, tmp_path, tiny_model_config):
        original = self.make(tiny_model_config)
        save_checkpoint(tmp_path / "model.ckpt", original)
        restored = load_checkpoint(tmp_path / "model.ckpt")
        assert restored.config == original.config
        assert restored.variant is ModelVariant.FULL
        assert restored.metadata == original.metadata
        for name, value in original.params.items():
            assert restored.params[name].tobytes() == value.tobytes()
        assert encode(restored) == encode(original)

    def test_bad_magic(self, tiny_model_config):
        blob = encode(self.make(tiny_model_config))
        with pytest.raises(DataError):
            decode(b"NOTCKP" + blob[6:])

    def test_truncated(self, tiny_model_config):
        blob = encode(self.make(tiny_model_config))
        with pytest.raises(DataError):
            decode(blob[:-8])
        with pytest.raises(DataError):
            decode(blob[:4])

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_checkpoint(tmp_path / "absent.ckpt")
