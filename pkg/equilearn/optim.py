"""
Adam optimizer and cosine learning-rate schedule
"""

import math
import numpy as np
from numba import njit
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
from config.settings import EXPERIMENT_CONFIG
from utils.errors import ShapeMismatch


@njit(cache=True)
def _adam_update_numba(
    p: np.ndarray,
    g: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    lr: float,
    beta1: float,
    beta2: float,
    eps: float,
    weight_decay: float,
    step: int,
    decoupled: bool
) -> None:
    """
    Numba-optimized in-place Adam update of one flat parameter array

    L2 mode adds weight_decay * p to the gradient; decoupled mode shrinks p
    by lr * weight_decay * p outside the adaptive step.
    """
    c1 = 1.0 - beta1 ** step
    c2 = 1.0 - beta2 ** step
    for i in range(p.shape[0]):
        grad = g[i]
        if not decoupled:
            grad += weight_decay * p[i]
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad * grad
        m_hat = m[i] / c1
        v_hat = v[i] / c2
        if decoupled:
            p[i] -= lr * weight_decay * p[i]
        p[i] -= lr * m_hat / (math.sqrt(v_hat) + eps)


@dataclass
class AdamState:
    params: List[np.ndarray]
    m: List[np.ndarray]
    v: List[np.ndarray]
    step: int = 0
    lr: float = EXPERIMENT_CONFIG['lr']
    betas: Tuple[float, float] = EXPERIMENT_CONFIG['betas']
    eps: float = EXPERIMENT_CONFIG['eps']
    weight_decay: float = EXPERIMENT_CONFIG['weight_decay']
    decoupled: bool = False


def adam_init(params: Sequence[np.ndarray], **hyper) -> AdamState:
    """Zero moments for a parameter list"""
    params = [np.array(p, dtype=np.float64) for p in params]
    return AdamState(
        params=params,
        m=[np.zeros_like(p) for p in params],
        v=[np.zeros_like(p) for p in params],
        **hyper,
    )


def adam_step(state: AdamState, grads: Sequence[np.ndarray], lr: Optional[float] = None) -> AdamState:
    """
    One bias-corrected Adam step; the input state is left untouched

    Args:
        state: Current parameters and moments
        grads: Gradients shaped like state.params
        lr: Learning rate for this step (defaults to state.lr)

    Returns:
        AdamState: New state with step + 1

    Raises:
        ShapeMismatch: a gradient does not match its parameter
    """
    if len(grads) != len(state.params):
        raise ShapeMismatch(f"{len(grads)} gradients for {len(state.params)} parameters")
    lr = state.lr if lr is None else lr
    step = state.step + 1
    beta1, beta2 = state.betas
    params, ms, vs = [], [], []
    for p, g, m, v in zip(state.params, grads, state.m, state.v):
        g = np.asarray(g, dtype=np.float64)
        if g.shape != p.shape:
            raise ShapeMismatch(f"gradient {g.shape} for parameter {p.shape}")
        p_new, m_new, v_new = p.ravel().copy(), m.ravel().copy(), v.ravel().copy()
        _adam_update_numba(
            p_new, np.ascontiguousarray(g.ravel()), m_new, v_new,
            float(lr), float(beta1), float(beta2), float(state.eps),
            float(state.weight_decay), step, bool(state.decoupled),
        )
        params.append(p_new.reshape(p.shape))
        ms.append(m_new.reshape(p.shape))
        vs.append(v_new.reshape(p.shape))
    return AdamState(params, ms, vs, step, state.lr, state.betas, state.eps, state.weight_decay, state.decoupled)


def cosine_lr(step: int, total_steps: int, base_lr: float) -> float:
    """base_lr * (1 + cos(pi * step / total_steps)) / 2"""
    if total_steps <= 0:
        return base_lr
    step = min(max(step, 0), total_steps)
    return base_lr * (1.0 + math.cos(math.pi * step / total_steps)) / 2.0
