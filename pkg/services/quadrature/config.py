import os
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent


@dataclass(frozen=True)
class Settings:
    """Runtime settings read from the environment"""
    threads: int
    log_level: str
    table_path: Path
    oracle_max_n: int


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default
    return max(value, minimum)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Build the settings once per process"""
    table_path = Path(os.getenv("QUADRULE_TABLE_PATH", "data/legendre_table.txt"))
    if not table_path.is_absolute():
        table_path = PROJECT_ROOT / table_path

    return Settings(
        threads=_int_env("QUADRULE_THREADS", 2),
        log_level=os.getenv("QUADRULE_LOG_LEVEL", "INFO").upper(),
        table_path=table_path,
        oracle_max_n=_int_env("QUADRULE_ORACLE_MAX_N", 2000),
    )
