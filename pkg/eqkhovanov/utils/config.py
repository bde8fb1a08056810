"""
Runtime configuration from the environment.

Values come from the process environment, optionally seeded from a .env file:
- EQKH_WORKERS: processes used for batch files
- EQKH_DEBUG: debug logging
- EQKH_VERIFY_SAMPLES: samples per randomized identity
- EQKH_MAX_CROSSINGS: largest diagram accepted
"""

import logging
import os
from dataclasses import dataclass

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass  # dotenv not required, can use system env vars

logger = logging.getLogger(__name__)


# ==========================================
# DEFAULTS
# ==========================================

DEFAULT_WORKERS = 1
DEFAULT_VERIFY_SAMPLES = 10000
DEFAULT_MAX_CROSSINGS = 12


# ==========================================
# HELPER FUNCTIONS
# ==========================================

def _truthy(value: str) -> bool:
    return value.lower() in ("true", "1", "yes")


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name, "")
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"{name}={raw!r} is not an integer; using {default}")
        return default
    if value < minimum:
        logger.warning(f"{name}={value} is below {minimum}; using {default}")
        return default
    return value


@dataclass(frozen=True)
class Settings:
    workers: int = DEFAULT_WORKERS
    debug: bool = False
    verify_samples: int = DEFAULT_VERIFY_SAMPLES
    max_crossings: int = DEFAULT_MAX_CROSSINGS


def load_settings() -> Settings:
    """Read the EQKH_* variables, falling back to defaults on bad values."""
    return Settings(
        workers=_int_env("EQKH_WORKERS", DEFAULT_WORKERS),
        debug=_truthy(os.getenv("EQKH_DEBUG", "")),
        verify_samples=_int_env("EQKH_VERIFY_SAMPLES", DEFAULT_VERIFY_SAMPLES),
        max_crossings=_int_env("EQKH_MAX_CROSSINGS", DEFAULT_MAX_CROSSINGS, minimum=0),
    )
