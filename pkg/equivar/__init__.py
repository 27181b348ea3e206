"""
Equivariant bases by output-node removal, and spherical tensor-product coupling
"""

from .basis import (
    EquivariantNetwork, EquivariantBasis, equivariant_basis, evaluate_basis_element,
    combine, pair_down, describe_element, probe_rank, basis_from_dict,
)
from .coupling import CouplingResult, tp_couple, tp_network_equals_cg, triangle_network

__all__ = [
    'EquivariantNetwork', 'EquivariantBasis', 'equivariant_basis', 'evaluate_basis_element',
    'combine', 'pair_down', 'describe_element', 'probe_rank', 'basis_from_dict',
    'CouplingResult', 'tp_couple', 'tp_network_equals_cg', 'triangle_network',
]
