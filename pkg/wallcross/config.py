import os

from wallcross.logging import logger


def _int_from_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw.strip())
    except ValueError:
        logger.warning(f"[CONFIG] {name}={raw!r} is not an integer, using default {default}")
        return default


# Window base k0 used when a case does not give one
DEFAULT_WINDOW_BASE = _int_from_env('WALLCROSS_WINDOW_BASE', 0)

# Output format for reports: text or json
DEFAULT_OUTPUT_FORMAT = os.environ.get('WALLCROSS_OUTPUT_FORMAT', 'text').lower()

# Scenario evaluation pool
WORKERS = max(1, _int_from_env('WALLCROSS_WORKERS', 4))
PARALLEL_ENABLED = os.environ.get('WALLCROSS_PARALLEL', 'ON').upper() == 'ON'

# Self-check defaults
SELF_CHECK_TRIALS = _int_from_env('WALLCROSS_SELF_CHECK_TRIALS', 200)
SELF_CHECK_SEED = _int_from_env('WALLCROSS_SELF_CHECK_SEED', 7)


def is_parallel_enabled() -> bool:
    """Check if scenario cases are evaluated on a thread pool."""
    return PARALLEL_ENABLED
