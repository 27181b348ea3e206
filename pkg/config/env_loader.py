"""
Environment Variable Loader
Loads runtime overrides from .env file or environment variables
"""

import os
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv

# Get project root directory
PROJECT_ROOT = Path(__file__).parent.parent

# Load .env file if it exists
env_file = PROJECT_ROOT / '.env'
if env_file.exists():
    load_dotenv(env_file)


def _positive_int(name: str) -> Optional[int]:
    """
    Read a positive integer from the environment

    Returns None when the variable is unset or not a positive integer.
    """
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value > 0 else None


# ==================== PARALLELISM ====================
SO3TENGEN_THREADS = _positive_int('SO3TENGEN_THREADS')
RAW_THREADS = os.getenv('SO3TENGEN_THREADS')

# ==================== LOGGING ====================
SO3TENGEN_LOG_LEVEL = os.getenv('SO3TENGEN_LOG_LEVEL')
SO3TENGEN_LOG_FILE = os.getenv('SO3TENGEN_LOG_FILE')


def validate_environment():
    """
    Validate optional environment overrides
    Returns: (is_valid, problems)
    """
    problems = []
    if RAW_THREADS is not None and SO3TENGEN_THREADS is None:
        problems.append(f"SO3TENGEN_THREADS={RAW_THREADS!r} is not a positive integer")
    if SO3TENGEN_LOG_LEVEL and SO3TENGEN_LOG_LEVEL.upper() not in (
        'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'
    ):
        problems.append(f"SO3TENGEN_LOG_LEVEL={SO3TENGEN_LOG_LEVEL!r} is not a logging level")
    return len(problems) == 0, problems


def resolve_workers(jobs: int, requested: Optional[int] = None) -> int:
    """
    Number of worker threads for a batch of independent jobs

    Args:
        jobs: Number of independent jobs
        requested: Explicit request (overrides PARALLEL_CONFIG default)

    Returns:
        int: Worker count, capped by SO3TENGEN_THREADS when set
    """
    from .settings import PARALLEL_CONFIG

    if jobs <= 0:
        return 1
    workers = requested or PARALLEL_CONFIG['max_workers'] or max(1, (os.cpu_count() or 2) - 1)
    if SO3TENGEN_THREADS is not None:
        workers = min(workers, SO3TENGEN_THREADS)
    return max(1, min(workers, jobs, PARALLEL_CONFIG['worker_cap']))
