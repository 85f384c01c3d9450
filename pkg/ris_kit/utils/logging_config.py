import logging
import os
from logging.handlers import RotatingFileHandler
from typing import Optional

from ris_kit.config import LOG_DIR, LOG_LEVEL


def setup_logging(level: Optional[str] = None, log_dir: Optional[str] = None):
    
    level = (level or LOG_LEVEL).upper()
    log_dir = LOG_DIR if log_dir is None else log_dir

    handlers = [logging.StreamHandler()]

    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        handlers.append(
            RotatingFileHandler(
                os.path.join(log_dir, "ris_kit.log"),
                maxBytes=10485760,  # 10MB
                backupCount=5
            )
        )

    logging.basicConfig(
        level=logging.WARNING,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True
    )
    
    
    logging.getLogger("ris_kit").setLevel(level)
