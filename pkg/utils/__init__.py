"""
Utility modules for so3tengen
"""

from .logger import get_logger, setup_logging, ProgressLogger
from .validators import TensorValidator

__all__ = ['get_logger', 'setup_logging', 'ProgressLogger', 'TensorValidator']
