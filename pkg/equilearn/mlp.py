"""
Multilayer perceptron with reverse-mode gradients
Affine layers, a hidden activation and a linear output layer, with an
optional linear skip from the input to the output
"""

import numpy as np
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
from utils.errors import DimensionMismatch

ACTIVATIONS = ('tanh', 'identity')


@dataclass
class MLPParams:
    """Weights are (out, in); a layer computes x @ Wᵀ + b. skip adds x @ skipᵀ to the output"""
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: str = 'tanh'
    skip: Optional[np.ndarray] = None

    @property
    def sizes(self) -> List[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def arrays(self) -> List[np.ndarray]:
        """Flat parameter list: W0, b0, W1, b1, ..., then skip when present"""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        if self.skip is not None:
            out.append(self.skip)
        return out

    @staticmethod
    def from_arrays(arrays: Sequence[np.ndarray], activation: str) -> 'MLPParams':
        arrays = list(arrays)
        skip = arrays.pop() if len(arrays) % 2 else None
        return MLPParams(arrays[0::2], arrays[1::2], activation, skip)

    def copy(self) -> 'MLPParams':
        return MLPParams(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.activation,
            None if self.skip is None else self.skip.copy(),
        )


def validate_params(params: MLPParams) -> None:
    """
    Raises:
        DimensionMismatch: layers do not chain, a bias has the wrong length
            or the skip does not map input to output
    """
    if params.activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {params.activation!r}")
    if len(params.weights) != len(params.biases) or not params.weights:
        raise DimensionMismatch("need one bias per weight matrix and at least one layer")
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        if b.shape != (w.shape[0],):
            raise DimensionMismatch(f"layer {k}: bias {b.shape} for weight {w.shape}")
        if k > 0 and w.shape[1] != params.weights[k - 1].shape[0]:
            raise DimensionMismatch(
                f"layer {k} expects {w.shape[1]} inputs, previous layer gives {params.weights[k - 1].shape[0]}"
            )
    if params.skip is not None:
        expected = (params.weights[-1].shape[0], params.weights[0].shape[1])
        if params.skip.shape != expected:
            raise DimensionMismatch(f"skip {params.skip.shape}, expected {expected}")


def init_mlp(
    sizes: Sequence[int],
    rng: np.random.Generator,
    activation: str = 'tanh',
    skip: bool = False
) -> MLPParams:
    """Glorot-uniform weights, zero biases, zero skip"""
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MLPParams(weights, biases, activation, np.zeros((sizes[-1], sizes[0])) if skip else None)


def zeros_like_mlp(sizes: Sequence[int], activation: str = 'tanh', skip: bool = False) -> MLPParams:
    return MLPParams(
        [np.zeros((o, i)) for i, o in zip(sizes[:-1], sizes[1:])],
        [np.zeros(o) for o in sizes[1:]],
        activation,
        np.zeros((sizes[-1], sizes[0])) if skip else None,
    )


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    return np.tanh(z) if activation == 'tanh' else z


def _forward(params: MLPParams, x: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray]]:
    validate_params(params)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.weights[0].shape[1]:
        raise DimensionMismatch(f"input width {x.shape[-1]}, network expects {params.weights[0].shape[1]}")
    layer_inputs = [x]
    h = x
    last = len(params.weights) - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w.T + b
        h = z if k == last else _activate(z, params.activation)
        layer_inputs.append(h)
    if params.skip is not None:
        h = h + x @ params.skip.T
    return h, layer_inputs


def mlp_apply(params: MLPParams, x: np.ndarray) -> np.ndarray:
    """Forward pass for one input (in,) or a batch (N, in)"""
    return _forward(params, x)[0]


def mlp_gradients(
    params: MLPParams,
    x: np.ndarray,
    upstream: np.ndarray,
    need_input_grad: bool = False
) -> Tuple[List[np.ndarray], Optional[np.ndarray]]:
    """
    Gradients of sum(upstream * mlp_apply(params, x)) by reverse accumulation

    Args:
        params: Network parameters
        x: Input (in,) or (N, in)
        upstream: dLoss/dOutput with the output's shape
        need_input_grad: Also return dLoss/dx

    Returns:
        Tuple: (gradients in MLPParams.arrays() order, input gradient or None)
    """
    out, layer_inputs = _forward(params, x)
    single = np.asarray(x).ndim == 1
    delta = np.asarray(upstream, dtype=np.float64).reshape(out.shape)
    if single:
        layer_inputs = [a[None, :] for a in layer_inputs]
        delta = delta[None, :]
    delta_out = delta

    grads: List[np.ndarray] = []
    last = len(params.weights) - 1
    for k in range(last, -1, -1):
        if k != last and params.activation == 'tanh':
            delta = delta * (1.0 - layer_inputs[k + 1] ** 2)
        grads.append(delta.sum(axis=0))
        grads.append(delta.T @ layer_inputs[k])
        delta = delta @ params.weights[k]
    grads.reverse()
    if params.skip is not None:
        grads.append(delta_out.T @ layer_inputs[0])
        delta = delta + delta_out @ params.skip

    input_grad = None
    if need_input_grad:
        input_grad = delta[0] if single else delta
    return grads, input_grad
