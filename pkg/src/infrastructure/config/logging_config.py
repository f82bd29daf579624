"""Logging setup shared by the CLI and the orchestrator"""

import logging
from typing import Optional

DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_configured = False


def setup_logging(level: str = "INFO", fmt: Optional[str] = None, force: bool = False) -> None:
    """Configure root logging once per process."""
    global _configured
    if _configured and not force:
        return

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=fmt or DEFAULT_LOG_FORMAT,
        force=force,
    )
    _configured = True
