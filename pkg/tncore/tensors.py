"""
Dense tensor primitives
Tensors are float64 numpy arrays in row-major order; rank 0 is a scalar
"""

import numpy as np
from numba import njit
from typing import Sequence, Tuple
from utils.errors import InvalidPermutation, ShapeMismatch
from utils.validators import TensorValidator


@njit(cache=True)
def _levi_civita_numba(n: int) -> np.ndarray:
    """
    Numba-optimized Levi-Civita symbol for n = 3

    eps[i, j, k] = (i - j)(j - k)(k - i) / 2 takes the values +1, -1, 0
    """
    out = np.zeros((n, n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                out[i, j, k] = (i - j) * (j - k) * (k - i) / 2.0
    return out


def as_tensor(values) -> np.ndarray:
    """Coerce to a float64 array (copy only when needed)"""
    return np.asarray(values, dtype=np.float64)


def delta() -> np.ndarray:
    """Kronecker delta on the 3D representation, shape (3, 3)"""
    return np.eye(3, dtype=np.float64)


def epsilon() -> np.ndarray:
    """Levi-Civita tensor, shape (3, 3, 3)"""
    return _levi_civita_numba(3)


def permute(t: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """
    Move axis k of t to position perm[k]

    result[i_perm(0), i_perm(1), ...] = t[i_0, i_1, ...]

    Args:
        t: Input tensor
        perm: Bijection on 0..rank-1

    Returns:
        np.ndarray: Permuted tensor

    Raises:
        InvalidPermutation: perm has the wrong length or repeats an axis
    """
    t = as_tensor(t)
    ok, message = TensorValidator.validate_permutation(perm, t.ndim)
    if not ok:
        raise InvalidPermutation(message)
    # np.transpose takes, for each result axis, the source axis
    return np.array(np.transpose(t, np.argsort(np.asarray(perm, dtype=np.int64))), order='C')


def contract(a: np.ndarray, b: np.ndarray, pairs: Sequence[Tuple[int, int]]) -> np.ndarray:
    """
    Sum over paired axes of two tensors

    Remaining axes are ordered a-first, then b, each in original order.

    Args:
        a: First tensor
        b: Second tensor
        pairs: (axis of a, axis of b) pairs to contract

    Returns:
        np.ndarray: Tensor of rank rank(a) + rank(b) - 2 * len(pairs)

    Raises:
        ShapeMismatch: paired extents differ, an axis is out of range or paired twice
    """
    a = as_tensor(a)
    b = as_tensor(b)
    axes_a = [int(p[0]) for p in pairs]
    axes_b = [int(p[1]) for p in pairs]

    if len(set(axes_a)) != len(axes_a) or len(set(axes_b)) != len(axes_b):
        raise ShapeMismatch(f"an axis is paired twice in {list(pairs)}")
    for ia, ib in zip(axes_a, axes_b):
        if not (0 <= ia < a.ndim and 0 <= ib < b.ndim):
            raise ShapeMismatch(f"pair ({ia}, {ib}) out of range for ranks {a.ndim}, {b.ndim}")
        if a.shape[ia] != b.shape[ib]:
            raise ShapeMismatch(
                f"extent mismatch on pair ({ia}, {ib}): {a.shape[ia]} != {b.shape[ib]}"
            )

    return np.tensordot(a, b, axes=(axes_a, axes_b))


def full_pairing(a: np.ndarray, b: np.ndarray) -> float:
    """Contract every axis of a with the same axis of b"""
    a = as_tensor(a)
    b = as_tensor(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot pair shapes {a.shape} and {b.shape}")
    return float(np.tensordot(a, b, axes=a.ndim))
