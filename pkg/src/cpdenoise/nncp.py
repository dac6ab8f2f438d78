"""Non-negative CP decomposition by hierarchical alternating least squares."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .nmf import NNCP_MAX_SWEEPS, _relative_decrease, init_factor
from .tensor import as_tensor3, cp_reconstruct, frobenius_sq, khatri_rao, unfold

__all__ = ["CpModel", "nncp_fit", "nncp_denoise", "select_rank"]


@dataclass(frozen=True, eq=False)
class CpModel:
    """Spectral ``a`` (F x K), temporal ``b`` (T x K) and recording ``c`` (N x K) factors."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    fit_history: list = field(default_factory=list)

    def __post_init__(self):
        if not self.a.shape[1] == self.b.shape[1] == self.c.shape[1]:
            raise ValueError("factor ranks disagree")

    @property
    def rank(self):
        return self.a.shape[1]

    @property
    def shape(self):
        return (self.a.shape[0], self.b.shape[0], self.c.shape[0])

    def reconstruct(self):
        return cp_reconstruct(self.a, self.b, self.c)

    def normalized(self):
        """Return ``(weights, a, b, c)`` with unit-norm factor columns.

        Columns are sorted by decreasing weight. Zero columns keep weight 0.
        """
        weights = np.ones(self.rank)
        unit = []
        for m in (self.a, self.b, self.c):
            norms = np.linalg.norm(m, axis=0)
            weights = weights * norms
            unit.append(m / np.where(norms > 0, norms, 1.0))
        order = np.argsort(-weights, kind="stable")
        return (weights[order],) + tuple(u[:, order] for u in unit)


def _cp_objective(x, a, b, c):
    return frobenius_sq(x - cp_reconstruct(a, b, c))


def _hals_mode(factor, mttkrp, gram, eps, rng, resid_scale):
    """Update every column of ``factor`` in place, Gauss-Seidel style."""
    for k in range(factor.shape[1]):
        gkk = gram[k, k]
        if not gkk > 0:
            # The other two modes are dead for this component; give it noise.
            factor[:, k] = init_factor(rng, factor.shape[0], resid_scale)
            continue
        step = (mttkrp[:, k] - factor @ gram[:, k]) / gkk
        factor[:, k] = np.maximum(eps, factor[:, k] + step)


def nncp_fit(x, cfg, callback=None):
    """Fit a rank-``cfg.rank`` non-negative CP model to ``x`` with HALS.

    One sweep updates the spectral, temporal and recording factors in that
    order. Within a mode each column ``k`` gets the closed-form update::

        a_k <- max(eps, a_k + (M[:, k] - A @ G[:, k]) / G[k, k])

    where ``M`` is the mode unfolding times the Khatri-Rao product of the two
    other factors and ``G`` is the Hadamard product of their Gram matrices.

    Parameters
    ----------
    x : array_like, shape (F, T, N)
        Non-negative tensor.
    cfg : cpdenoise.nmf.SolverConfig
    callback : callable, optional
        Called as ``callback(sweep, a, b, c)`` after every sweep.

    Returns
    -------
    CpModel
        ``fit_history`` holds the objective at initialization and after each
        sweep.
    """
    x = as_tensor3(x)
    if np.any(x < 0):
        raise ValueError("nncp_fit requires non-negative input; apply abs_transform first")
    f, t, n = x.shape
    k = cfg.rank
    bound = min(t * n, f * n, f * t)
    if k > bound:
        raise ValueError(f"rank {k} exceeds the bound {bound} set by the tensor shape")

    rng = np.random.default_rng(cfg.seed)
    scale = np.cbrt(x.mean() / k)
    a = init_factor(rng, (f, k), scale)
    b = init_factor(rng, (t, k), scale)
    c = init_factor(rng, (n, k), scale)
    eps = cfg.epsilon_floor
    unfoldings = [unfold(x, mode) for mode in range(3)]

    max_sweeps = NNCP_MAX_SWEEPS if cfg.max_iters is None else cfg.max_iters
    history = [_cp_objective(x, a, b, c)]
    for sweep in range(max_sweeps):
        resid_scale = np.cbrt(np.sqrt(history[-1] / x.size) / k)
        _hals_mode(a, unfoldings[0] @ khatri_rao(c, b), (c.T @ c) * (b.T @ b),
                   eps, rng, resid_scale)
        _hals_mode(b, unfoldings[1] @ khatri_rao(c, a), (c.T @ c) * (a.T @ a),
                   eps, rng, resid_scale)
        _hals_mode(c, unfoldings[2] @ khatri_rao(b, a), (b.T @ b) * (a.T @ a),
                   eps, rng, resid_scale)
        history.append(_cp_objective(x, a, b, c))
        if callback is not None:
            callback(sweep, a, b, c)
        if _relative_decrease(history[-2], history[-1]) < cfg.rel_tol:
            break
    return CpModel(a=a, b=b, c=c, fit_history=history)


def nncp_denoise(model):
    """Low-rank reconstruction of the data the model was fitted on."""
    return model.reconstruct()


def select_rank(errors_by_k):
    """Pick a rank from ``(K, fit_error)`` pairs with the elbow rule.

    The chosen rank is the interior point farthest (perpendicular distance)
    from the straight line through the first and last points, ties going to
    the smaller ``K``.
    """
    pts = sorted((int(kk), float(err)) for kk, err in errors_by_k)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 candidate ranks, got {len(pts)}")
    ks = np.array([p[0] for p in pts], dtype=float)
    errs = np.array([p[1] for p in pts])
    if np.any(np.diff(errs) > 0):
        warnings.warn("fit error is not non-increasing in K", RuntimeWarning, stacklevel=2)

    dx, dy = ks[-1] - ks[0], errs[-1] - errs[0]
    length = np.hypot(dx, dy)
    if length == 0:
        return int(ks[1])
    dist = np.abs(dx * (errs[0] - errs) - dy * (ks[0] - ks)) / length
    interior = dist[1:-1]
    best = np.flatnonzero(interior >= interior.max() - 1e-12 * max(length, 1.0))[0]
    return int(ks[1 + best])
