import logging
import os
import sys
from datetime import datetime


class TenthSecondFormatter(logging.Formatter):
    def formatTime(self, record, datefmt=None):
        dt = datetime.fromtimestamp(record.created)
        base = dt.strftime('%Y-%m-%d %H:%M:%S')
        tenths = int(record.msecs / 100)
        return f"{base},{tenths}"


# Reports go to stdout; diagnostics stay on stderr
handler = logging.StreamHandler(sys.stderr)
handler.setFormatter(
    TenthSecondFormatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
)

logger = logging.getLogger('wallcross')
logger.addHandler(handler)
logger.propagate = False
logger.setLevel(os.environ.get('WALLCROSS_LOG_LEVEL', 'WARNING').upper())


def set_log_level(level: str) -> None:
    """Change verbosity of the package logger at runtime."""
    try:
        logger.setLevel(level.upper())
    except ValueError:
        logger.warning(f"[LOGGING] Unknown log level {level!r}, keeping {logging.getLevelName(logger.level)}")
