"""
Rotations and their action on Cartesian tensors
"""

import numpy as np
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union
from scipy.spatial.transform import Rotation as ScipyRotation
from tncore.tensors import as_tensor
from utils.errors import ShapeMismatch
from utils.validators import TensorValidator

SeedLike = Union[None, int, np.random.Generator]


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Reuse a Generator or build one from a seed"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Rotation:
    """Special-orthogonal 3x3 matrix acting on the (1) representation"""
    m: np.ndarray

    @staticmethod
    def identity() -> 'Rotation':
        return Rotation(np.eye(3))

    def __matmul__(self, other: 'Rotation') -> 'Rotation':
        return Rotation(self.m @ other.m)

    @property
    def T(self) -> 'Rotation':
        return Rotation(self.m.T.copy())


def random_rotation(seed: SeedLike = None) -> Rotation:
    """
    Haar-distributed rotation from a normalized Gaussian quaternion

    Args:
        seed: Integer seed or a numpy Generator (advanced in place)

    Returns:
        Rotation: Uniformly distributed element of SO(3)
    """
    rng = as_generator(seed)
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    return Rotation(ScipyRotation.from_quat(q).as_matrix())


def random_rotations(n: int, seed: SeedLike = None) -> List[Rotation]:
    rng = as_generator(seed)
    return [random_rotation(rng) for _ in range(n)]


def apply_per_axis(t: np.ndarray, matrices: Sequence[Optional[np.ndarray]]) -> np.ndarray:
    """
    Apply one matrix to each axis: out[a..] = sum M_k[a_k, b_k] t[b..]

    None leaves an axis untouched. Works for complex matrices.
    """
    t = np.asarray(t)
    if len(matrices) != t.ndim:
        raise ShapeMismatch(f"{len(matrices)} matrices for a rank-{t.ndim} tensor")
    for axis, m in enumerate(matrices):
        if m is None:
            continue
        if m.shape[1] != t.shape[axis]:
            raise ShapeMismatch(
                f"matrix of shape {m.shape} cannot act on axis {axis} of extent {t.shape[axis]}"
            )
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)
    return t


def rotate_cartesian(r: Rotation, t: np.ndarray) -> np.ndarray:
    """
    Apply R to every axis of a Cartesian tensor (the R^{⊗r} action)

    Raises:
        ShapeMismatch: an axis does not have extent 3
    """
    t = as_tensor(t)
    ok, message = TensorValidator.validate_spatial_axes(t)
    if not ok:
        raise ShapeMismatch(message)
    if t.ndim == 0:
        return t.copy()
    return np.array(apply_per_axis(t, [r.m] * t.ndim), order='C')
