"""Synthetic constructions shared by unit and acceptance tests."""

import numpy as np


def artefact_tensor(seed=0, f=32, t=40, n=20, rank=2, noise=0.02, artefact_gain=1.0,
                    artefact_slice=7):
    """``n`` noisy copies of one rank-``rank`` spectrogram, one copy carrying a burst.

    Returns ``(x, shared, artefact, mask, artefact_slice)`` where ``shared``
    is the clean common slice, ``artefact`` the additive burst and ``mask``
    its support.
    """
    rng = np.random.default_rng(seed)
    # well separated spectral bumps, each with its own slow temporal envelope
    bins = np.arange(f)[:, None]
    centers = (np.arange(rank) + 0.5) * f / rank
    spectral = 0.05 + np.exp(-0.5 * ((bins - centers) / 2.0) ** 2)
    frames = np.arange(t)[:, None]
    phases = 2 * np.pi * np.arange(rank) / rank + rng.uniform(0, 0.2)
    temporal = 1.0 + 0.5 * np.sin(2 * np.pi * frames / t + phases)
    shared = spectral @ temporal.T
    artefact = np.zeros((f, t))
    mask = np.zeros((f, t), dtype=bool)
    mask[f // 4: f // 4 + 5, t // 3: t // 3 + 6] = True
    artefact[mask] = artefact_gain * shared.max()
    x = np.repeat(shared[:, :, None], n, axis=2)
    x = x + noise * rng.standard_normal(x.shape)
    x[:, :, artefact_slice] += artefact
    return np.asfortranarray(np.maximum(x, 0.0)), shared, artefact, mask, artefact_slice


def artefact_metrics(x_hat, shared, artefact, mask, artefact_slice):
    """Fraction of the burst's energy removed, and fraction of shared energy kept."""
    left = (x_hat[:, :, artefact_slice] - shared)[mask]
    removed = 1.0 - np.sum(left**2) / np.sum(artefact[mask] ** 2)
    shared_all = np.repeat(shared[:, :, None], x_hat.shape[2], axis=2)
    kept = 1.0 - np.sum((x_hat - shared_all) ** 2) / np.sum(shared_all**2)
    return removed, kept
