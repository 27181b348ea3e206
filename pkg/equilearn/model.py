"""
Stress models: the equivariant equiK family and the plain MLP baseline
"""

import numpy as np
from dataclasses import dataclass
from typing import List, Sequence, Tuple
from equilearn.features import (
    EQUI3, EQUI7, coefficient_inputs, equivariant_feature_batch,
)
from equilearn.mlp import MLPParams, init_mlp, mlp_apply, mlp_gradients
from utils.errors import ShapeMismatch

VARIANTS = ('mlp', 'equi3', 'equi7')
VARIANT_FEATURES = {'equi3': EQUI3, 'equi7': EQUI7}


@dataclass
class StressModel:
    """
    Model parameters plus the input standardization fitted on training data

    equiK: P = sum_k h_k(z) E_k(F) with z the standardized trace invariants
           and log|det F|. h has a linear skip from z, fitted by least
           squares at initialization, under a residual perceptron.
    mlp:   P = reshape(h(z) * out_std + out_mean) with z the standardized
           flattened F. Only scalar standardization touches equiK, so it
           stays exactly equivariant.
    """
    variant: str
    params: MLPParams
    in_mean: np.ndarray
    in_std: np.ndarray
    out_mean: np.ndarray
    out_std: np.ndarray

    @property
    def features(self) -> Tuple[int, ...]:
        return VARIANT_FEATURES[self.variant]


def model_inputs(variant: str, F: np.ndarray) -> np.ndarray:
    F = np.asarray(F, dtype=np.float64).reshape(-1, 3, 3)
    if variant == 'mlp':
        return F.reshape(-1, 9)
    return coefficient_inputs(F)


def init_model(
    variant: str,
    hidden: Sequence[int],
    rng: np.random.Generator,
    F_train: np.ndarray,
    P_train: np.ndarray,
    activation: str = 'tanh'
) -> StressModel:
    """
    Fresh model with standardization statistics from the training set

    equiK starts from the least-squares affine coefficients with the
    perceptron output layer zeroed, so training fits the residual.

    Raises:
        ValueError: unknown variant
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown model variant {variant!r}")
    x = model_inputs(variant, F_train)
    in_mean = x.mean(axis=0)
    in_std = np.where(x.std(axis=0) > 1e-12, x.std(axis=0), 1.0)

    sizes = [x.shape[1]] + list(hidden)
    if variant == 'mlp':
        y = np.asarray(P_train).reshape(-1, 9)
        out_mean = y.mean(axis=0)
        out_std = np.where(y.std(axis=0) > 1e-12, y.std(axis=0), 1.0)
        params = init_mlp(sizes + [9], rng, activation)
        return StressModel(variant, params, in_mean, in_std, out_mean, out_std)

    features = VARIANT_FEATURES[variant]
    n_out = len(features)
    params = init_mlp(sizes + [n_out], rng, activation, skip=True)
    z = (x - in_mean) / in_std
    E = equivariant_feature_batch(F_train)[:, list(features)]
    coef = _affine_coefficients(z, E, P_train)
    params.biases[-1] = coef[:, 0]
    params.skip = coef[:, 1:]
    params.weights[-1] = np.zeros_like(params.weights[-1])
    return StressModel(variant, params, in_mean, in_std, np.zeros(n_out), np.ones(n_out))


def _affine_coefficients(z: np.ndarray, E: np.ndarray, P: np.ndarray) -> np.ndarray:
    """
    Least-squares fit of P ≈ sum_k (a_k0 + a_k · z) E_k over the batch, shape (K, d + 1)
    """
    n, k = E.shape[:2]
    zt = np.column_stack([np.ones(n), z])
    design = np.einsum('nj,nkab->nabkj', zt, E).reshape(9 * n, k * zt.shape[1])
    coef, *_ = np.linalg.lstsq(design, np.asarray(P, dtype=np.float64).reshape(-1), rcond=None)
    return coef.reshape(k, zt.shape[1])


def model_forward(model: StressModel, F: np.ndarray) -> np.ndarray:
    """
    Predicted stress for one F (3x3) or a batch (N, 3, 3)
    """
    F = np.asarray(F, dtype=np.float64)
    single = F.ndim == 2
    z = (model_inputs(model.variant, F) - model.in_mean) / model.in_std
    h = mlp_apply(model.params, z)
    if model.variant == 'mlp':
        P = (h * model.out_std + model.out_mean).reshape(-1, 3, 3)
    else:
        E = equivariant_feature_batch(F)[:, list(model.features)]
        P = np.einsum('nk,nkij->nij', h, E)
    return P[0] if single else P


def mse(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean squared error over all matrix entries"""
    return float(np.mean((np.asarray(pred) - np.asarray(target)) ** 2))


def loss_and_gradients(model: StressModel, F: np.ndarray, P: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """
    MSE loss and its gradients with respect to model.params.arrays()

    Raises:
        ShapeMismatch: F and P batches differ
    """
    F = np.asarray(F, dtype=np.float64).reshape(-1, 3, 3)
    P = np.asarray(P, dtype=np.float64).reshape(-1, 3, 3)
    if F.shape != P.shape:
        raise ShapeMismatch(f"F batch {F.shape} and P batch {P.shape} differ")

    z = (model_inputs(model.variant, F) - model.in_mean) / model.in_std
    h = mlp_apply(model.params, z)
    n_entries = P.size

    if model.variant == 'mlp':
        pred = (h * model.out_std + model.out_mean).reshape(-1, 3, 3)
        d_pred = 2.0 * (pred - P) / n_entries
        upstream = d_pred.reshape(-1, 9) * model.out_std
    else:
        E = equivariant_feature_batch(F)[:, list(model.features)]
        pred = np.einsum('nk,nkij->nij', h, E)
        d_pred = 2.0 * (pred - P) / n_entries
        upstream = np.einsum('nij,nkij->nk', d_pred, E)

    loss = float(np.mean((pred - P) ** 2))
    grads, _ = mlp_gradients(model.params, z, upstream)
    return loss, grads
