"""
Validation utilities for so3tengen
Every check returns (is_valid, message); callers decide which error to raise
"""

import numpy as np
from typing import Sequence, Tuple
from utils.logger import get_logger

logger = get_logger(__name__)


class TensorValidator:
    """
    Validate tensors, permutations and run configurations
    """

    @staticmethod
    def validate_shape(t: np.ndarray, expected: Sequence[int], what: str = 'tensor') -> Tuple[bool, str]:
        """
        Check that a tensor has exactly the expected shape

        Args:
            t: Tensor to check
            expected: Expected extents
            what: Name used in the message

        Returns:
            Tuple[bool, str]: (is_valid, error_message)
        """
        if t is None:
            return False, f"{what} is None"
        if tuple(t.shape) != tuple(expected):
            return False, f"{what} has shape {tuple(t.shape)}, expected {tuple(expected)}"
        return True, "Shape validation passed"

    @staticmethod
    def validate_permutation(perm: Sequence[int], rank: int) -> Tuple[bool, str]:
        """
        Check that perm is a bijection on 0..rank-1
        """
        if len(perm) != rank:
            return False, f"permutation of length {len(perm)} for a rank-{rank} tensor"
        if sorted(int(p) for p in perm) != list(range(rank)):
            return False, f"{list(perm)} is not a permutation of 0..{rank - 1}"
        return True, "Permutation validation passed"

    @staticmethod
    def validate_spatial_axes(t: np.ndarray) -> Tuple[bool, str]:
        """Every axis must have extent 3"""
        bad = [axis for axis, n in enumerate(t.shape) if n != 3]
        if bad:
            return False, f"axes {bad} of shape {tuple(t.shape)} do not have extent 3"
        return True, "Spatial axes validation passed"

    @staticmethod
    def validate_same_shapes(values: Sequence[np.ndarray]) -> Tuple[bool, str]:
        if len(values) == 0:
            return True, "Empty sequence"
        first = values[0].shape
        for j, v in enumerate(values[1:], 1):
            if v.shape != first:
                return False, f"value {j} has shape {v.shape}, expected {first}"
        return True, "Shape agreement passed"

    @staticmethod
    def validate_train_config(cfg) -> Tuple[bool, str]:
        """
        Validate an experiment configuration

        Args:
            cfg: equilearn TrainConfig

        Returns:
            Tuple[bool, str]: (is_valid, error_message)
        """
        if not cfg.train_sizes:
            return False, "train_sizes is empty"
        if any(n <= 0 for n in cfg.train_sizes):
            return False, f"train sizes must be positive: {cfg.train_sizes}"
        if cfg.val_size <= 0 or cfg.test_size <= 0:
            return False, "validation and test sizes must be positive"
        if cfg.runs <= 0:
            return False, "runs must be positive"
        if cfg.variant not in ('mlp', 'equi3', 'equi7'):
            return False, f"unknown model variant {cfg.variant!r}"
        if cfg.law not in ('neo_hookean', 'linear'):
            return False, f"unknown constitutive law {cfg.law!r}"
        if not 0.0 < cfg.amplitude < 1.0:
            return False, f"amplitude must lie in (0, 1), got {cfg.amplitude}"
        if cfg.epochs_small <= 0 or cfg.epochs_large <= 0:
            return False, "epoch counts must be positive"
        if cfg.batch_size is not None and cfg.batch_size <= 0:
            return False, "batch_size must be positive"
        if cfg.lr <= 0:
            return False, "learning rate must be positive"

        logger.debug(f"Validated training configuration for variant {cfg.variant}")
        return True, "Train config validation passed"
