"""
Tensor-network generators of SO(3)-invariant polynomials
"""

from .signature import Slot, Signature, parse_signature, format_signature
from .canonical import canonical_key
from .enumerate import GeneratorNetwork, enumerate_candidates
from .generators import (
    GeneratorSet, enumerate_networks, dedup_numeric, evaluate_generator, wrap_spherical,
    epsilon_pair_reduce_check, span_dimensions, invariant_features, generator_set_from_dict,
)

__all__ = [
    'Slot', 'Signature', 'parse_signature', 'format_signature', 'canonical_key',
    'GeneratorNetwork', 'enumerate_candidates', 'GeneratorSet', 'enumerate_networks',
    'dedup_numeric', 'evaluate_generator', 'wrap_spherical', 'epsilon_pair_reduce_check',
    'span_dimensions', 'invariant_features', 'generator_set_from_dict',
]
