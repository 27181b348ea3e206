"""
Dense tensors, tensor-network graphs and their contraction
"""

from .tensors import delta, epsilon, permute, contract, full_pairing
from .network import Node, TensorNetwork, remove_node, network_from_dict
from .contraction import contract_network, contraction_path

__all__ = [
    'delta', 'epsilon', 'permute', 'contract', 'full_pairing',
    'Node', 'TensorNetwork', 'remove_node', 'network_from_dict',
    'contract_network', 'contraction_path',
]
