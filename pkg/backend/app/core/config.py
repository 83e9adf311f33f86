# backend/app/core/config.py
import logging
import os

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"{name}={raw!r} is not an integer, using {default}")
        return default


def _level_env(name: str, default: str) -> str:
    level = os.getenv(name, default).strip().upper()
    if not isinstance(logging.getLevelName(level), int):
        logger.warning(f"{name}={level!r} is not a log level, using {default}")
        return default
    return level


class Config:
    """Runtime settings read from the environment (and an optional .env file)."""

    # Numerical tolerances
    HERMITIAN_ATOL = 1e-10
    TRACE_ATOL = 1e-10
    PSD_ATOL = 1e-10
    SYMMETRY_ATOL = 1e-10
    UNITARY_ATOL = 1e-10
    INITIAL_NORM_ATOL = 1e-10
    STATE_NORM_ATOL = 1e-8
    EVOLVED_NORM_ATOL = 1e-9
    NULL_PROJECTION_NORM2 = 1e-24
    EIGEN_FLOOR = 1e-14

    # Storage / sizing
    SPARSE_FRACTION = 0.10
    MAX_MODES = 2 ** 15

    def __init__(self):
        self.THREADS = _int_env("FOCKBRIDGE_THREADS", 0)
        self.LOG_LEVEL = _level_env("FOCKBRIDGE_LOG_LEVEL", "INFO")
        self.PARALLEL_MIN_DIM = _int_env("FOCKBRIDGE_PARALLEL_MIN_DIM", 256)

    def worker_count(self) -> int:
        """Worker cap; 0 means one worker per CPU."""
        if self.THREADS <= 0:
            return max(1, os.cpu_count() or 1)
        return self.THREADS


settings = Config()
