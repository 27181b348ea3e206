"""
Invariant and equivariant features of a deformation gradient
"""

import numpy as np
from numba import njit
from typing import List

N_INVARIANTS = 5
N_COEFFICIENT_INPUTS = N_INVARIANTS + 1
EQUI3 = (0, 1, 2)
EQUI7 = (0, 1, 2, 3, 4, 5, 6)
FEATURE_NAMES = ('I', 'F', 'Fᵀ', 'FF', 'FFᵀ', 'FᵀF', 'FᵀFᵀ')


@njit(cache=True)
def _invariants_batch_numba(F: np.ndarray) -> np.ndarray:
    """
    Numba-optimized traces: Tr F, Tr FFᵀ, Tr F², Tr F³, Tr F²Fᵀ
    """
    n = F.shape[0]
    out = np.empty((n, 5), dtype=np.float64)
    for s in range(n):
        f = F[s]
        f2 = f @ f
        out[s, 0] = f[0, 0] + f[1, 1] + f[2, 2]
        t1 = 0.0
        t2 = 0.0
        t3 = 0.0
        t4 = 0.0
        for i in range(3):
            for j in range(3):
                t1 += f[i, j] * f[i, j]
                t2 += f[i, j] * f[j, i]
                t3 += f2[i, j] * f[j, i]
                # Tr(F² Fᵀ) = sum_ij (F²)_ij F_ij
                t4 += f2[i, j] * f[i, j]
        out[s, 1] = t1
        out[s, 2] = t2
        out[s, 3] = t3
        out[s, 4] = t4
    return out


@njit(cache=True)
def _equivariant_batch_numba(F: np.ndarray) -> np.ndarray:
    """
    Numba-optimized features I, F, Fᵀ, FF, FFᵀ, FᵀF, FᵀFᵀ, shape (N, 7, 3, 3)
    """
    n = F.shape[0]
    out = np.zeros((n, 7, 3, 3), dtype=np.float64)
    for s in range(n):
        f = np.ascontiguousarray(F[s])
        ft = np.ascontiguousarray(f.T)
        for i in range(3):
            out[s, 0, i, i] = 1.0
        out[s, 1] = f
        out[s, 2] = ft
        out[s, 3] = f @ f
        out[s, 4] = f @ ft
        out[s, 5] = ft @ f
        out[s, 6] = ft @ ft
    return out


def _batch(F: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(F, dtype=np.float64).reshape(-1, 3, 3))


def feature_invariants(F: np.ndarray) -> np.ndarray:
    """
    The five trace invariants, shape (5,) for one F or (N, 5) for a batch
    """
    F = np.asarray(F, dtype=np.float64)
    out = _invariants_batch_numba(_batch(F))
    return out[0] if F.ndim == 2 else out


def coefficient_inputs(F: np.ndarray) -> np.ndarray:
    """Trace invariants plus log|det F|, shape (N, 6)"""
    F = _batch(F)
    log_det = np.log(np.abs(np.linalg.det(F)))
    return np.column_stack([_invariants_batch_numba(F), log_det])


def equivariant_feature_batch(F: np.ndarray) -> np.ndarray:
    """Shape (N, 7, 3, 3)"""
    return _equivariant_batch_numba(_batch(F))


def equivariant_features(F: np.ndarray) -> List[np.ndarray]:
    """The seven matrices I, F, Fᵀ, FF, FFᵀ, FᵀF, FᵀFᵀ for one deformation"""
    return list(_equivariant_batch_numba(_batch(F))[0])


def equivariant_combination(F: np.ndarray, coeffs: np.ndarray, features=EQUI7) -> np.ndarray:
    """
    P = sum_k coeffs_k E_k(F) over the selected features

    Args:
        F: (3, 3) or (N, 3, 3)
        coeffs: (K,) or (N, K) with K = len(features)
        features: Indices into the seven equivariant features
    """
    F = np.asarray(F, dtype=np.float64)
    E = equivariant_feature_batch(F)[:, list(features)]
    coeffs = np.asarray(coeffs, dtype=np.float64).reshape(E.shape[0], -1)
    out = np.einsum('nk,nkij->nij', coeffs, E)
    return out[0] if F.ndim == 2 else out
