"""Dense autoencoder trained with Adam, backpropagation written out in numpy.

Encoder: ``d_in -> 64 -> 64 -> 8``; decoder: ``8 -> 64 -> 64 -> d_in``.
Hidden layers (bottleneck included) use ReLU; the output layer is linear so
that raw, sign-unrestricted log-Mel inputs can be reconstructed.
"""

from dataclasses import dataclass, replace

import numpy as np

from .features import stack_frames
from .tensor import as_tensor3

__all__ = [
    "HIDDEN_DIMS",
    "AutoencoderParams",
    "AdamState",
    "TrainConfig",
    "init_params",
    "forward",
    "encode",
    "loss",
    "batch_losses",
    "grad",
    "adam_step",
    "frames_from_tensor",
    "train",
]

HIDDEN_DIMS = (64, 64, 8, 64, 64)
BOTTLENECK_LAYER = 3  # number of layers making up the encoder


@dataclass(frozen=True, eq=False)
class AutoencoderParams:
    """Per-layer weights of shape ``(fan_in, fan_out)`` and biases of shape ``(fan_out,)``."""

    weights: tuple
    biases: tuple
    loss_history: tuple = ()

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need one bias per weight matrix")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError(f"layer {i}: weight {w.shape} / bias {b.shape} mismatch")
            if i and self.weights[i - 1].shape[1] != w.shape[0]:
                raise ValueError(f"layer {i} input does not match previous layer output")

    @property
    def layer_dims(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def d_in(self):
        return self.weights[0].shape[0]

    def arrays(self):
        return list(self.weights) + list(self.biases)

    def with_arrays(self, arrays):
        n = len(self.weights)
        return replace(self, weights=tuple(arrays[:n]), biases=tuple(arrays[n:]))


@dataclass
class AdamState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: list = None
    v: list = None


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 512
    shuffle_seed: int = 0
    init_seed: int = 0
    learning_rate: float = 1e-3

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def init_params(d_in, seed=0, hidden=HIDDEN_DIMS):
    """Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng(seed)
    dims = [d_in, *hidden, d_in]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return AutoencoderParams(weights=tuple(weights), biases=tuple(biases))


def _check_input(params, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.d_in:
        raise ValueError(f"input width {x.shape[-1]} != network input {params.d_in}")
    return x


def _forward_cache(params, x):
    """Return pre-activations and activations for every layer."""
    acts = [x]
    pre = []
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = acts[-1] @ w + b
        pre.append(z)
        acts.append(z if i == last else np.maximum(z, 0.0))
    return pre, acts


def forward(params, x):
    """Reconstruct ``x`` (one vector or a batch of row vectors)."""
    x = _check_input(params, x)
    return _forward_cache(params, x)[1][-1]


def encode(params, x):
    """Bottleneck code of ``x``."""
    h = _check_input(params, x)
    for w, b in zip(params.weights[:BOTTLENECK_LAYER], params.biases[:BOTTLENECK_LAYER]):
        h = np.maximum(h @ w + b, 0.0)
    return h


def batch_losses(params, xs):
    """Squared reconstruction error of each row of ``xs``."""
    xs = np.atleast_2d(_check_input(params, xs))
    r = xs - forward(params, xs)
    return np.einsum("ij,ij->i", r, r)


def loss(params, x):
    """``||x - D(E(x))||^2`` for a single vector."""
    x = _check_input(params, x)
    if x.ndim != 1:
        raise ValueError("loss takes a single vector; use batch_losses for batches")
    r = x - forward(params, x)
    return float(r @ r)


def grad(params, batch):
    """Gradient of the mean batch loss with respect to every weight and bias.

    Returns ``(mean_loss, grads)`` where ``grads`` is an
    :class:`AutoencoderParams` holding the derivatives. The ReLU derivative
    at 0 is taken as 0.
    """
    xs = np.atleast_2d(_check_input(params, batch))
    n = xs.shape[0]
    if n == 0:
        raise ValueError("empty batch")
    pre, acts = _forward_cache(params, xs)
    resid = acts[-1] - xs
    mean_loss = float(np.einsum("ij,ij->", resid, resid)) / n

    delta = (2.0 / n) * resid
    gw = [None] * len(params.weights)
    gb = [None] * len(params.weights)
    for i in range(len(params.weights) - 1, -1, -1):
        gw[i] = acts[i].T @ delta
        gb[i] = delta.sum(axis=0)
        if i:
            delta = (delta @ params.weights[i].T) * (pre[i - 1] > 0)
    return mean_loss, AutoencoderParams(weights=tuple(gw), biases=tuple(gb))


def adam_step(params, grads, state):
    """One Adam update; mutates ``state`` and returns the new parameters."""
    arrays = params.arrays()
    g = grads.arrays()
    if state.m is None:
        state.m = [np.zeros_like(a) for a in arrays]
        state.v = [np.zeros_like(a) for a in arrays]
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1**state.step
    corr2 = 1.0 - b2**state.step
    new = []
    for a, gi, m, v in zip(arrays, g, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * gi
        v *= b2
        v += (1.0 - b2) * gi * gi
        new.append(a - state.learning_rate * (m / corr1) / (np.sqrt(v / corr2) + state.epsilon))
    return params.with_arrays(new)


def frames_from_tensor(x, mel_width=5):
    """Stacked-frame vectors of every recording, recordings kept in order."""
    x = as_tensor3(x)
    return np.concatenate([stack_frames(x[:, :, n], mel_width) for n in range(x.shape[2])])


def train(x_train, cfg=None, mel_width=5):
    """Fit the autoencoder to the stacked frames of every slice of ``x_train``.

    The returned parameters carry ``loss_history``: the mean loss over the
    whole training set before the first update, followed by the running mean
    batch loss of each epoch.
    """
    cfg = cfg or TrainConfig()
    frames = frames_from_tensor(x_train, mel_width)
    if frames.shape[0] == 0:
        raise ValueError("empty training set")
    params = init_params(frames.shape[1], seed=cfg.init_seed)
    state = AdamState(learning_rate=cfg.learning_rate)
    rng = np.random.default_rng(cfg.shuffle_seed)

    history = [float(batch_losses(params, frames).mean())]
    n = frames.shape[0]
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = frames[order[start:start + cfg.batch_size]]
            batch_loss, g = grad(params, batch)
            params = adam_step(params, g, state)
            total += batch_loss * batch.shape[0]
        history.append(total / n)
    return replace(params, loss_history=tuple(history))
