"""Dense matrix and 3-way tensor primitives.

Tensors are ``numpy`` arrays of shape ``(F, T, N)``: frequency, frame and
recording. Storage follows Fortran order so that the frequency index runs
fastest, then the frame index, then the recording index. With that layout the
matricization used throughout the package is a plain reshape.

Column ``(t, n)`` of a matricized tensor (0-based) sits at ``n * T + t``, and
:func:`khatri_rao` uses the same convention for its rows.
"""

import numpy as np

__all__ = [
    "as_tensor3",
    "as_matrix",
    "matricize",
    "tensorize",
    "unfold",
    "khatri_rao",
    "frobenius_sq",
    "cp_reconstruct",
]


def as_matrix(m, name="matrix"):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if min(m.shape) < 1:
        raise ValueError(f"{name} has an empty dimension: {m.shape}")
    return m


def as_tensor3(x, name="tensor"):
    """Validate ``x`` as a non-empty float64 ``(F, T, N)`` array in Fortran order."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"{name} must be 3-D (F, T, N), got shape {x.shape}")
    if min(x.shape) < 1:
        raise ValueError(f"{name} has an empty dimension: {x.shape}")
    return np.asfortranarray(x)


def matricize(x):
    """Concatenate the frontal slices ``x[:, :, n]`` side by side.

    Returns the ``F x (T*N)`` matrix ``[X_1, X_2, ..., X_N]``.
    """
    x = as_tensor3(x)
    f, t, n = x.shape
    return x.reshape(f, t * n, order="F")


def tensorize(m, dim_t, dim_n):
    """Inverse of :func:`matricize`."""
    m = as_matrix(m)
    if m.shape[1] != dim_t * dim_n:
        raise ValueError(
            f"matrix has {m.shape[1]} columns, expected dim_t*dim_n = {dim_t * dim_n}"
        )
    return np.asfortranarray(m.reshape(m.shape[0], dim_t, dim_n, order="F"))


def unfold(x, mode):
    """Mode-``mode`` unfolding whose column order matches :func:`khatri_rao`.

    ``unfold(x, 0)`` is :func:`matricize`, pairing with ``khatri_rao(C, B)``;
    mode 1 pairs with ``khatri_rao(C, A)`` and mode 2 with ``khatri_rao(B, A)``.
    In each case the remaining index with the smaller mode number runs fastest.
    """
    x = as_tensor3(x)
    if mode == 0:
        return matricize(x)
    if mode == 1:
        return np.transpose(x, (1, 0, 2)).reshape(x.shape[1], -1, order="F")
    if mode == 2:
        return np.transpose(x, (2, 0, 1)).reshape(x.shape[2], -1, order="F")
    raise ValueError(f"mode must be 0, 1 or 2, got {mode}")


def khatri_rao(c, b):
    """Column-wise Kronecker product ``c ⊙ b``.

    Row ``n * b.shape[0] + t`` of column ``k`` holds ``c[n, k] * b[t, k]``.
    """
    c = as_matrix(c, "c")
    b = as_matrix(b, "b")
    if c.shape[1] != b.shape[1]:
        raise ValueError(
            f"column counts differ: c has {c.shape[1]}, b has {b.shape[1]}"
        )
    k = c.shape[1]
    return (c[:, None, :] * b[None, :, :]).reshape(c.shape[0] * b.shape[0], k)


def frobenius_sq(a):
    """Sum of squared entries of a matrix or tensor.

    Entries are summed in Fortran order, so a tensor and its matricization
    give bit-identical results.
    """
    v = np.asarray(a, dtype=np.float64).ravel(order="F")
    return float(v @ v)


def cp_reconstruct(a, b, c):
    """Sum of the rank-1 tensors ``a[:, k] x b[:, k] x c[:, k]``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    c = as_matrix(c, "c")
    if not a.shape[1] == b.shape[1] == c.shape[1]:
        raise ValueError(
            f"factor ranks disagree: {a.shape[1]}, {b.shape[1]}, {c.shape[1]}"
        )
    return tensorize(a @ khatri_rao(c, b).T, b.shape[0], c.shape[0])
