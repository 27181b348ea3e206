"""
Configuration package for so3tengen
Exports all configuration variables for use across the application
"""

from .settings import (
    # Tensor core
    TNCORE_CONFIG,

    # Representation theory
    SO3_CONFIG,

    # Generator enumeration
    ENUMERATION_CONFIG,

    # Monte-Carlo verification
    VERIFY_CONFIG,

    # Constitutive-law experiment
    EXPERIMENT_CONFIG,

    # Thread pools
    PARALLEL_CONFIG,

    # CLI exit codes
    EXIT_CODES,

    # Logging Configuration
    LOGGING_CONFIG,
)

__all__ = [
    'TNCORE_CONFIG',
    'SO3_CONFIG',
    'ENUMERATION_CONFIG',
    'VERIFY_CONFIG',
    'EXPERIMENT_CONFIG',
    'PARALLEL_CONFIG',
    'EXIT_CODES',
    'LOGGING_CONFIG',
]
