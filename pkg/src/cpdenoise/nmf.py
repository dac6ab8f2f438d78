"""Non-negative matrix factorization by multiplicative updates."""

from dataclasses import dataclass, field

import numpy as np

from .tensor import as_matrix, frobenius_sq, tensorize

__all__ = ["SolverConfig", "NmfModel", "nmf_fit", "nmf_denoise", "objective_increased"]

# Slack allowed when checking that a solver objective did not go up.
MONOTONE_RTOL = 1e-9

# Multiplicative updates converge far more slowly per iteration than HALS.
NMF_MAX_ITERS = 2000
NNCP_MAX_SWEEPS = 500


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule and seeding shared by the NMF and nnCP solvers.

    ``rel_tol`` stops the solver once ``(f_prev - f) / f_prev`` drops below it.
    ``epsilon_floor`` keeps denominators (NMF) and factor entries (HALS) away
    from zero. ``max_iters=None`` picks the solver's own budget:
    :data:`NMF_MAX_ITERS` multiplicative updates or :data:`NNCP_MAX_SWEEPS`
    HALS sweeps.
    """

    rank: int
    max_iters: int = None
    rel_tol: float = 1e-6
    seed: int = 0
    epsilon_floor: float = 1e-12

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        if self.max_iters is not None and self.max_iters < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.epsilon_floor > 0:
            raise ValueError(f"epsilon_floor must be > 0, got {self.epsilon_floor}")


@dataclass(frozen=True, eq=False)
class NmfModel:
    """Factors of ``X ≈ a @ b.T`` with ``a`` spectral (F x K) and ``b`` temporal (TN x K)."""

    a: np.ndarray
    b: np.ndarray
    fit_history: list = field(default_factory=list)

    @property
    def rank(self):
        return self.a.shape[1]

    def reconstruct(self):
        return self.a @ self.b.T


def objective_increased(prev, cur, scale):
    """True when ``cur`` exceeds ``prev`` by more than the monotonicity slack.

    ``scale`` (usually the squared norm of the data) adds a rounding floor so
    that objectives near zero are not judged on float noise.
    """
    return cur > prev + MONOTONE_RTOL * prev + 64 * np.finfo(float).eps * scale


def init_factor(rng, shape, scale):
    # uniform on (0, 1]
    return (1.0 - rng.random(shape)) * scale


def _relative_decrease(prev, cur):
    if prev <= 0:
        return 0.0
    return (prev - cur) / prev


def nmf_fit(x_mat, cfg, callback=None):
    """Fit ``x_mat ≈ A Bᵗ`` with non-negative factors (Lee-Seung updates).

    Parameters
    ----------
    x_mat : array_like, shape (F, M)
        Non-negative data matrix. Log-Mel data must go through
        :func:`cpdenoise.features.abs_transform` first.
    cfg : SolverConfig
    callback : callable, optional
        Called as ``callback(iteration, a, b)`` after every update.

    Returns
    -------
    NmfModel
        ``fit_history`` holds the squared Frobenius objective at
        initialization followed by one value per iteration.
    """
    x = as_matrix(x_mat, "x_mat")
    if np.any(x < 0):
        raise ValueError("nmf_fit requires non-negative input; apply abs_transform first")
    f, m = x.shape
    k = cfg.rank
    if k > min(f, m):
        raise ValueError(f"rank {k} exceeds min(F, T*N) = {min(f, m)}")

    rng = np.random.default_rng(cfg.seed)
    scale = np.sqrt(x.mean() / k)
    a = init_factor(rng, (f, k), scale)
    b = init_factor(rng, (m, k), scale)
    eps = cfg.epsilon_floor

    max_iters = NMF_MAX_ITERS if cfg.max_iters is None else cfg.max_iters
    history = [frobenius_sq(x - a @ b.T)]
    for it in range(max_iters):
        a *= (x @ b) / (a @ (b.T @ b) + eps)
        b *= (x.T @ a) / (b @ (a.T @ a) + eps)
        history.append(frobenius_sq(x - a @ b.T))
        if callback is not None:
            callback(it, a, b)
        if _relative_decrease(history[-2], history[-1]) < cfg.rel_tol:
            break
    return NmfModel(a=a, b=b, fit_history=history)


def nmf_denoise(model, dim_t, dim_n):
    """Rebuild the ``(F, T, N)`` tensor from the low-rank product ``A Bᵗ``."""
    if model.b.shape[0] != dim_t * dim_n:
        raise ValueError(
            f"model has {model.b.shape[0]} temporal rows, expected {dim_t} * {dim_n}"
        )
    return tensorize(model.reconstruct(), dim_t, dim_n)
