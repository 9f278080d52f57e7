import logging
import os

LOG_DIR = os.environ.get("ANISOTRAP_LOG_DIR", "logs")
LOG_FILE = os.path.join(LOG_DIR, "anisotrap.log")
LOG_LEVEL = os.environ.get("ANISOTRAP_LOG_LEVEL", "INFO").upper()

os.makedirs(LOG_DIR, exist_ok=True)

logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format="%(asctime)s [%(levelname)s] %(message)s",
    handlers=[
        logging.FileHandler(LOG_FILE, encoding="utf-8"),
        logging.StreamHandler(),
    ],
)


def get_logger(name=None):
    return logging.getLogger(name)
