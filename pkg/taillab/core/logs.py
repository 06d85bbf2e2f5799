"""Process-wide logger setup; the level comes from TAILLAB_LOG_LEVEL."""

from __future__ import annotations

import logging
import sys
import threading

from taillab.core.env_loader import get_env_str

_ROOT_NAME = "taillab"
_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_lock = threading.Lock()
_configured = False


def _configure_root() -> None:
    global _configured
    with _lock:
        if _configured:
            return
        root = logging.getLogger(_ROOT_NAME)
        level_name = get_env_str("TAILLAB_LOG_LEVEL", "INFO").upper()
        level = logging.getLevelName(level_name)
        if not isinstance(level, int):
            level = logging.INFO
        root.setLevel(level)
        if not root.handlers:
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(logging.Formatter(_FORMAT))
            root.addHandler(handler)
        root.propagate = False
        _configured = True


def get_logger(name: str) -> logging.Logger:
    _configure_root()
    if name == _ROOT_NAME or name.startswith(_ROOT_NAME + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{_ROOT_NAME}.{name}")


def set_level(level_name: str) -> None:
    _configure_root()
    level = logging.getLevelName(level_name.upper())
    if isinstance(level, int):
        logging.getLogger(_ROOT_NAME).setLevel(level)
