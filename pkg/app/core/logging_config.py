import logging

from rich.console import Console
from rich.logging import RichHandler

from app.core.config import LOG_LEVEL

# Diagnostics and logs go to stderr; stdout carries command output only.
stderr_console = Console(stderr=True)


def configure_logging(level: int | str = LOG_LEVEL) -> None:
    """ Routes the stdlib logging tree through a rich handler on stderr. """
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=stderr_console, rich_tracebacks=True, show_path=False)],
        force=True,
    )
