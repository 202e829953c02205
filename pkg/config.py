import os
import logging
from dotenv import load_dotenv

# Load settings from .env file (all optional)
load_dotenv()

LOG_LEVEL = os.getenv("SUPERCHAR_LOG_LEVEL", "WARNING")
LOG_FILE = os.getenv("SUPERCHAR_LOG_FILE")

ENUMERATION_GUARD = int(os.getenv("SUPERCHAR_ENUMERATION_GUARD", "9"))  # largest |K| we enumerate S_K(q) for
POSET_GUARD = int(os.getenv("SUPERCHAR_POSET_GUARD", "200000"))  # max children from one descent call
CACHE_SIZE = int(os.getenv("SUPERCHAR_CACHE_SIZE", "65536"))
CHECK_INVARIANTS = os.getenv("SUPERCHAR_CHECK_INVARIANTS", "1").lower() not in ("0", "false", "no")
BATCH_WORKERS = int(os.getenv("SUPERCHAR_BATCH_WORKERS", "4"))

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def setup_logging(level=None, log_file=None):
    """Configure root logging once: console always, file when requested."""
    handlers = [logging.StreamHandler()]
    log_file = log_file or LOG_FILE
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.WARNING),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
