"""Centralised logging configuration.

:func:`configure_logging` sets up the root logger with one format for
the whole package.  The CLI calls it at startup; library modules only
ever log through ``logging.getLogger(__name__)``.

Usage:

.. code-block:: python

    from cavity_xtalk.core.logging_config import configure_logging
    configure_logging(level=logging.DEBUG)

"""

from __future__ import annotations

import logging
from typing import Optional, Union

DEFAULT_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def configure_logging(level: Union[int, str] = logging.INFO, fmt: Optional[str] = None) -> None:
    """Configure the root logger with a standard format and level.

    If the root logger already has handlers this call has no effect.

    Args:
        level: Logging level, either numeric (``logging.DEBUG``) or a level
            name such as ``"WARNING"``.
        fmt: Optional log format string.  Defaults to :data:`DEFAULT_FORMAT`.
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            raise ValueError(f"unknown logging level: {level}")
    logging.basicConfig(level=level, format=fmt or DEFAULT_FORMAT, datefmt=DATE_FORMAT)


__all__ = ["configure_logging", "DEFAULT_FORMAT"]
