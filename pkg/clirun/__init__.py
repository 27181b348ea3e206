"""
Command-line surface: enumerate, basis, verify, experiment and dump
"""

from .commands import build_parser, run
from .report import VerificationReport, verify, verify_basis, verify_generator_set

__all__ = [
    'build_parser', 'run',
    'VerificationReport', 'verify', 'verify_basis', 'verify_generator_set',
]
