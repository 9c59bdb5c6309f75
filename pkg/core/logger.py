import logging
import sys
from typing import Optional, TextIO

__all__ = ["setup_logger"]

def setup_logger(name: str = "bouncer", level: int = logging.INFO, fmt: Optional[str] = None,
                 stream: Optional[TextIO] = None):
    """Return a configured ``logging.Logger`` instance.

    Repeated calls with the same ``name`` return the existing logger, only
    the level is refreshed. Library modules log through
    ``logging.getLogger(__name__)`` below the ``bouncer`` hierarchy, so
    configuring the parent once is enough.

    ``stream`` defaults to stdout; the CLI passes stderr because stdout
    carries the CSV/JSON payload.
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        logger.setLevel(level)
        return logger  # Already configured

    logger.setLevel(level)
    handler = logging.StreamHandler(stream=stream or sys.stdout)
    formatter = logging.Formatter(fmt or "[%(levelname)s] %(message)s")
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    return logger
