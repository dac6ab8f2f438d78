import numpy as np
import pytest

from cpdenoise.autoencoder import (
    HIDDEN_DIMS,
    AdamState,
    AutoencoderParams,
    TrainConfig,
    adam_step,
    batch_losses,
    encode,
    forward,
    frames_from_tensor,
    grad,
    init_params,
    loss,
    train,
)


def numeric_grad(params, batch, h=1e-5):
    arrays = params.arrays()
    out = []
    for idx, a in enumerate(arrays):
        g = np.zeros_like(a)
        for pos in np.ndindex(a.shape):
            bumped = [x.copy() for x in arrays]
            bumped[idx][pos] += h
            up = batch_losses(params.with_arrays(bumped), batch).mean()
            bumped[idx][pos] -= 2 * h
            down = batch_losses(params.with_arrays(bumped), batch).mean()
            g[pos] = (up - down) / (2 * h)
        out.append(g)
    return out


def identity_params(d_in):
    """Non-negative inputs pass unchanged through every ReLU layer."""
    dims = [d_in, *HIDDEN_DIMS, d_in]
    ws = tuple(np.eye(i, o) for i, o in zip(dims[:-1], dims[1:]))
    bs = tuple(np.zeros(o) for o in dims[1:])
    return AutoencoderParams(ws, bs)


def test_architecture_dims():
    p = init_params(320)
    assert p.layer_dims == [320, 64, 64, 8, 64, 64, 320]
    assert encode(p, np.ones(320)).shape == (8,)


def test_glorot_bounds_and_zero_bias():
    p = init_params(100, seed=3)
    for w in p.weights:
        limit = np.sqrt(6.0 / sum(w.shape))
        assert np.abs(w).max() <= limit
        assert np.abs(w).max() > 0.9 * limit
    assert all(np.all(b == 0) for b in p.biases)


def test_zero_params_give_zero_output():
    p = init_params(10)
    zero = p.with_arrays([np.zeros_like(a) for a in p.arrays()])
    x = np.arange(10.0)
    np.testing.assert_array_equal(forward(zero, x), np.zeros(10))
    assert loss(zero, x) == pytest.approx(np.sum(x**2))


def test_identity_network():
    p = identity_params(6)
    x = np.random.default_rng(0).random((5, 6))
    np.testing.assert_array_equal(forward(p, x), x)
    np.testing.assert_array_equal(batch_losses(p, x), np.zeros(5))


def test_forward_matches_loop_oracle():
    p = init_params(7, seed=1)
    rng = np.random.default_rng(2)
    p = p.with_arrays([a + 0.1 * rng.standard_normal(a.shape) for a in p.arrays()])
    x = rng.standard_normal(7)
    h = list(x)
    for i, (w, b) in enumerate(zip(p.weights, p.biases)):
        nxt = []
        for j in range(w.shape[1]):
            z = b[j] + sum(h[k] * w[k, j] for k in range(w.shape[0]))
            nxt.append(z if i == len(p.weights) - 1 else max(z, 0.0))
        h = nxt
    np.testing.assert_allclose(forward(p, x), h, rtol=1e-12, atol=1e-12)


def test_batch_losses_match_single_loss():
    p = init_params(9, seed=4)
    xs = np.random.default_rng(5).standard_normal((4, 9))
    np.testing.assert_allclose(batch_losses(p, xs), [loss(p, x) for x in xs], rtol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    p = init_params(6, seed=seed)
    p = p.with_arrays([a + 0.05 * rng.standard_normal(a.shape) for a in p.arrays()])
    batch = rng.standard_normal((3, 6))
    value, g = grad(p, batch)
    assert value == pytest.approx(batch_losses(p, batch).mean(), rel=1e-12)
    for analytic, numeric in zip(g.arrays(), numeric_grad(p, batch)):
        scale = max(np.abs(numeric).max(), 1e-8)
        assert np.abs(analytic - numeric).max() / scale <= 1e-4


def test_duplicated_batch_has_same_gradient():
    p = init_params(6, seed=1)
    batch = np.random.default_rng(0).standard_normal((4, 6))
    _, g1 = grad(p, batch)
    _, g2 = grad(p, np.vstack([batch, batch]))
    for a, b in zip(g1.arrays(), g2.arrays()):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


def test_adam_first_step_moves_by_learning_rate():
    p = init_params(5, seed=0)
    _, g = grad(p, np.ones((2, 5)))
    state = AdamState(learning_rate=0.01)
    p2 = adam_step(p, g, state)
    for a, b, gi in zip(p.arrays(), p2.arrays(), g.arrays()):
        step = a - b
        big = np.abs(gi) > 1e-6
        np.testing.assert_allclose(step[big], 0.01 * np.sign(gi[big]), rtol=1e-3)
    assert state.step == 1


def test_constant_dataset_is_learned():
    x = np.full((4, 12, 6), 3.0, order="F")
    cfg = TrainConfig(epochs=200, batch_size=8, learning_rate=1e-2)
    p = train(x, cfg, mel_width=2)
    hist = p.loss_history
    assert len(hist) == 201
    assert hist[-1] < 0.01 * hist[0]


def test_training_is_deterministic():
    x = np.random.default_rng(0).random((4, 10, 3))
    cfg = TrainConfig(epochs=3, batch_size=5, init_seed=2, shuffle_seed=7)
    a, b = train(x, cfg, 2), train(x, cfg, 2)
    for u, v in zip(a.arrays(), b.arrays()):
        np.testing.assert_array_equal(u, v)
    assert a.loss_history == b.loss_history


def test_frames_from_tensor_order():
    x = np.random.default_rng(0).random((3, 6, 2))
    fr = frames_from_tensor(x, 2)
    assert fr.shape == (10, 6)
    np.testing.assert_array_equal(fr[5], x[:, 0:2, 1].T.ravel())


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)


def test_input_width_checked():
    p = init_params(4)
    with pytest.raises(ValueError):
        forward(p, np.ones(5))
    with pytest.raises(ValueError):
        loss(p, np.ones((2, 4)))


def test_params_shape_validation():
    with pytest.raises(ValueError):
        AutoencoderParams((np.ones((2, 3)),), (np.ones(2),))
    with pytest.raises(ValueError):
        AutoencoderParams((np.ones((2, 3)), np.ones((4, 2))), (np.ones(3), np.ones(2)))
