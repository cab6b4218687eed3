import json
import math

import numpy as np
import pytest

from neurosld import (
    Layer,
    ModelFormatError,
    Network,
    backprop_update,
    cross_entropy,
    forward,
    init_network,
    layer_init,
    load_network,
    loss_and_gradients,
    networks_equal,
    save_network,
    softmax,
)

from oracles import finite_difference_gradients, max_relative_error


def small_net(seed=0, dims=(4, 3, 2), activation="sigmoid", scale=0.7):
    specs = []
    for i in range(len(dims) - 2):
        specs.append((f"h{i}", dims[i], dims[i + 1], activation, scale))
    specs.append(("out", dims[-2], dims[-1], "softmax", scale))
    return init_network(specs, seed)


class TestLayerInit:
    def test_zero_scale_gives_zero_parameters(self):
        rng = np.random.default_rng(1)
        layer = layer_init("l", 3, 2, "sigmoid", 0.0, rng)
        assert not layer.weights.any()
        assert not layer.biases.any()

    def test_shape_contract(self):
        rng = np.random.default_rng(1)
        layer = layer_init("l", 20, 16, "tanh", 0.5, rng)
        assert layer.weights.shape == (16, 20)
        assert layer.biases.shape == (16,)

    def test_unknown_activation_rejected(self):
        rng = np.random.default_rng(1)
        with pytest.raises(ValueError, match="softplus"):
            layer_init("l", 3, 2, "softplus", 0.5, rng)

    def test_nonpositive_dims_rejected(self):
        rng = np.random.default_rng(1)
        with pytest.raises(ValueError):
            layer_init("l", 0, 2, "sigmoid", 0.5, rng)

    def test_negative_scale_rejected(self):
        rng = np.random.default_rng(1)
        with pytest.raises(ValueError):
            layer_init("l", 3, 2, "sigmoid", -0.1, rng)

    def test_deterministic_for_seed(self):
        a = init_network([("l", 4, 3, "sigmoid", 0.5)], 9)
        b = init_network([("l", 4, 3, "sigmoid", 0.5)], 9)
        assert networks_equal(a, b)

    def test_scale_bounds_respected(self):
        rng = np.random.default_rng(3)
        layer = layer_init("l", 50, 40, "linear", 0.25, rng)
        assert np.abs(layer.weights).max() <= 0.25
        assert np.abs(layer.biases).max() <= 0.25


class TestNetworkValidation:
    def test_chain_mismatch_rejected(self):
        l1 = Layer("a", np.zeros((3, 2)), np.zeros(3), "sigmoid")
        l2 = Layer("b", np.zeros((2, 4)), np.zeros(2), "softmax")
        with pytest.raises(ValueError):
            Network((l1, l2))

    def test_softmax_only_final(self):
        l1 = Layer("a", np.zeros((3, 2)), np.zeros(3), "softmax")
        l2 = Layer("b", np.zeros((2, 3)), np.zeros(2), "softmax")
        with pytest.raises(ValueError, match="final layer"):
            Network((l1, l2))

    def test_deep_label(self):
        shallow = small_net(dims=(4, 3, 2))
        assert not shallow.is_deep
        dims = (4, 4, 4, 4, 4, 4, 2)
        assert small_net(dims=dims).hidden_layer_count == 5
        assert small_net(dims=dims).is_deep


class TestForward:
    def test_identity_linear_layer(self):
        layer = Layer("id", np.eye(3), np.zeros(3), "linear")
        out, _ = forward(Network((layer,)), np.array([1.0, -2.0, 0.5]))
        assert np.array_equal(out, np.array([1.0, -2.0, 0.5]))

    def test_zero_sigmoid_gives_half(self):
        layer = Layer("s", np.zeros((4, 2)), np.zeros(4), "sigmoid")
        out, _ = forward(Network((layer,)), np.array([3.0, -1.0]))
        assert np.allclose(out, 0.5)

    def test_hand_computed_sigmoid_layer(self):
        # independent scalar computation with math.exp
        w = np.array([[0.5, -0.25], [1.0, 2.0]])
        b = np.array([0.1, -0.2])
        x = np.array([1.0, 2.0])
        layer = Layer("s", w, b, "sigmoid")
        out, _ = forward(Network((layer,)), x)
        z0 = 0.5 * 1.0 + -0.25 * 2.0 + 0.1
        z1 = 1.0 * 1.0 + 2.0 * 2.0 + -0.2
        expected = [1.0 / (1.0 + math.exp(-z0)), 1.0 / (1.0 + math.exp(-z1))]
        assert abs(out[0] - expected[0]) < 1e-9
        assert abs(out[1] - expected[1]) < 1e-9

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            forward(small_net(), np.zeros(7))

    def test_cache_supports_backprop(self):
        net = small_net()
        _, caches = forward(net, np.array([0.1, 0.2, 0.3, 0.4]))
        assert len(caches) == len(net.layers)


class TestSoftmax:
    def test_symmetry(self):
        assert np.allclose(softmax(np.array([0.0, 0.0])), [0.5, 0.5])

    def test_analytic_values(self):
        out = softmax(np.log(np.array([1.0, 2.0, 3.0])))
        assert np.allclose(out, [1 / 6, 1 / 3, 1 / 2])

    def test_shift_invariance(self):
        z = np.array([0.3, -1.2, 4.0])
        assert np.allclose(softmax(z), softmax(z + 123.0), atol=1e-12)

    def test_sums_to_one_and_overflow_safe(self):
        out = softmax(np.array([1000.0, 999.0, 998.0]))
        assert abs(out.sum() - 1.0) < 1e-9
        assert (out > 0).all()
        assert np.isfinite(out).all()


class TestCrossEntropy:
    def test_uniform_prediction(self):
        pred = np.full(3, 1 / 3)
        assert abs(cross_entropy(pred, np.array([0.0, 1.0, 0.0])) - math.log(3)) < 1e-12

    def test_perfect_prediction(self):
        target = np.array([0.0, 1.0])
        assert cross_entropy(target, target) < 1e-9

    def test_half_half(self):
        loss = cross_entropy(np.array([0.5, 0.5]), np.array([1.0, 0.0]))
        assert abs(loss - math.log(2)) < 1e-12

    def test_zero_prediction_clamped(self):
        loss = cross_entropy(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        assert loss == pytest.approx(-math.log(1e-12))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cross_entropy(np.array([1.0]), np.array([1.0, 0.0]))


class TestBackprop:
    def test_single_softmax_layer_closed_form(self):
        net = init_network([("out", 3, 2, "softmax", 0.5)], 4)
        x = np.array([0.2, -0.4, 1.0])
        target = np.array([1.0, 0.0])
        pred, _ = forward(net, x)
        _, grads = loss_and_gradients(net, x, target)
        assert np.allclose(grads[0][0], np.outer(pred - target, x), atol=1e-12)
        assert np.allclose(grads[0][1], pred - target, atol=1e-12)

    def test_gradients_match_finite_differences(self):
        net = small_net(seed=2, dims=(4, 5, 3), activation="tanh")
        x = np.array([0.3, -0.2, 0.8, 0.1])
        target = np.array([0.0, 0.0, 1.0])
        _, analytic = loss_and_gradients(net, x, target)
        numeric = finite_difference_gradients(net, x, target)
        assert max_relative_error(analytic, numeric) < 1e-4

    def test_relu_gradients_match_finite_differences(self):
        # inputs chosen away from the relu kink
        net = small_net(seed=6, dims=(3, 4, 2), activation="relu")
        x = np.array([0.9, -0.7, 0.6])
        target = np.array([1.0, 0.0])
        _, analytic = loss_and_gradients(net, x, target)
        numeric = finite_difference_gradients(net, x, target)
        assert max_relative_error(analytic, numeric) < 1e-4

    def test_loss_reported_at_pre_update_parameters(self):
        net = small_net(seed=3)
        x = np.array([0.1, 0.5, -0.3, 0.2])
        target = np.array([1.0, 0.0])
        pred, _ = forward(net, x)
        expected = cross_entropy(pred, target)
        _, loss = backprop_update(net, x, target, 0.5)
        assert loss == pytest.approx(expected)

    def test_update_returns_new_network(self):
        net = small_net(seed=3)
        x = np.array([0.1, 0.5, -0.3, 0.2])
        target = np.array([1.0, 0.0])
        updated, _ = backprop_update(net, x, target, 0.5)
        assert not networks_equal(net, updated)
        again = small_net(seed=3)
        assert networks_equal(net, again)

    def test_repeated_updates_converge(self):
        net = small_net(seed=1, dims=(3, 6, 4))
        x = np.array([0.5, -1.0, 0.25])
        target = np.array([0.0, 0.0, 1.0, 0.0])
        loss = None
        for _ in range(500):
            net, loss = backprop_update(net, x, target, 0.1)
        assert loss < 0.01

    def test_requires_softmax_output(self):
        net = Network((Layer("l", np.zeros((2, 2)), np.zeros(2), "sigmoid"),))
        with pytest.raises(ValueError, match="softmax"):
            loss_and_gradients(net, np.zeros(2), np.array([1.0, 0.0]))


class TestSaveLoad:
    def test_round_trip_is_bitwise(self, tmp_path):
        net = small_net(seed=11, dims=(5, 4, 3))
        path = tmp_path / "model.json"
        save_network(net, path)
        assert networks_equal(load_network(path), net)

    def test_truncated_file_rejected(self, tmp_path):
        net = small_net()
        path = tmp_path / "model.json"
        save_network(net, path)
        path.write_text(path.read_text()[: 40])
        with pytest.raises(ModelFormatError):
            load_network(path)

    def test_version_mismatch_rejected(self, tmp_path):
        net = small_net()
        path = tmp_path / "model.json"
        save_network(net, path)
        data = json.loads(path.read_text())
        data["version"] = 2
        path.write_text(json.dumps(data))
        with pytest.raises(ModelFormatError, match="version"):
            load_network(path)

    def test_missing_version_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps({"layers": []}))
        with pytest.raises(ModelFormatError):
            load_network(path)

    def test_chainability_checked_after_load(self, tmp_path):
        net = small_net()
        path = tmp_path / "model.json"
        save_network(net, path)
        data = json.loads(path.read_text())
        data["layers"][0]["weights"] = [[0.0, 0.0]]
        data["layers"][0]["biases"] = [0.0]
        data["layers"][0]["in"] = 2
        data["layers"][0]["out"] = 1
        path.write_text(json.dumps(data))
        with pytest.raises(ModelFormatError):
            load_network(path)

    def test_declared_dims_must_match(self, tmp_path):
        net = small_net()
        path = tmp_path / "model.json"
        save_network(net, path)
        data = json.loads(path.read_text())
        data["layers"][0]["in"] = 99
        path.write_text(json.dumps(data))
        with pytest.raises(ModelFormatError):
            load_network(path)
