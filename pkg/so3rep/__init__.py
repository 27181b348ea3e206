"""
SO(3) representations: rotations, irreps, projectors and Clebsch-Gordan tensors
"""

from .rotations import Rotation, random_rotation, random_rotations, rotate_cartesian, apply_per_axis
from .projectors import (
    Projector, IrrepMatrix, multiplicity, decompose, lowering_op, projector, irrep_matrix,
)
from .clebsch import CGTensor, cg, coupling_Q, change_of_basis_O, sum_projector
from .symmetric import is_symmetric_tensor

__all__ = [
    'Rotation', 'random_rotation', 'random_rotations', 'rotate_cartesian', 'apply_per_axis',
    'Projector', 'IrrepMatrix', 'multiplicity', 'decompose', 'lowering_op', 'projector',
    'irrep_matrix', 'CGTensor', 'cg', 'coupling_Q', 'change_of_basis_O', 'sum_projector',
    'is_symmetric_tensor',
]
