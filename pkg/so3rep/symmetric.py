"""
Symmetric (isotropic) tensor predicate
"""

import numpy as np
from typing import Optional, Sequence
from config.settings import SO3_CONFIG
from so3rep.projectors import irrep_matrix
from so3rep.rotations import SeedLike, apply_per_axis, random_rotations
from tncore.tensors import as_tensor
from utils.errors import ShapeMismatch


def is_symmetric_tensor(
    t: np.ndarray,
    reps: Sequence[int],
    tol: float = 1e-10,
    rotations: Optional[int] = None,
    seed: SeedLike = None
) -> bool:
    """
    Check ρ_1(g) ⊗ ... ⊗ ρ_n(g) T = T on random rotations

    Args:
        t: Tensor with axis k of extent 2*reps[k]+1
        reps: Irrep type of each axis
        tol: Largest allowed entrywise deviation
        rotations: Number of rotations (SO3_CONFIG default)
        seed: Rotation seed (SO3_CONFIG default)

    Returns:
        bool: True when every rotation leaves t unchanged within tol

    Raises:
        ShapeMismatch: axis extents do not match the types
    """
    t = as_tensor(t)
    expected = tuple(2 * l + 1 for l in reps)
    if t.shape != expected:
        raise ShapeMismatch(f"tensor of shape {t.shape} does not carry types {list(reps)}")

    n = SO3_CONFIG['symmetric_check_rotations'] if rotations is None else rotations
    seed = SO3_CONFIG['symmetric_check_seed'] if seed is None else seed
    for r in random_rotations(n, seed):
        moved = apply_per_axis(t, [irrep_matrix(r, l).d for l in reps])
        if np.max(np.abs(moved - t), initial=0.0) > tol:
            return False
    return True
