"""
Console Logging
Colored log formatting for terminal output.
"""

import logging
import sys
from typing import Optional

from colorama import Fore, Style, init as colorama_init

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

LEVEL_COLORS = {
    "DEBUG": Fore.CYAN,
    "INFO": Fore.GREEN,
    "WARNING": Fore.YELLOW,
    "ERROR": Fore.RED,
    "CRITICAL": Fore.MAGENTA + Style.BRIGHT,
}


class ColorFormatter(logging.Formatter):
    """Formatter that colors the level name when writing to a terminal."""

    def __init__(self, fmt: str = LOG_FORMAT, use_color: bool = True):
        super().__init__(fmt)
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        if not self.use_color:
            return super().format(record)
        original = record.levelname
        record.levelname = f"{LEVEL_COLORS.get(original, '')}{original}{Style.RESET_ALL}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


def setup_logging(level: str = "INFO", stream=None) -> None:
    """
    Configure root logging once for the CLI.

    Args:
        level: Level name (DEBUG, INFO, WARNING, ...)
        stream: Target stream, stderr by default
    """
    stream = stream or sys.stderr
    use_color = hasattr(stream, "isatty") and stream.isatty()
    if use_color:
        colorama_init()

    handler = logging.StreamHandler(stream)
    handler.setFormatter(ColorFormatter(use_color=use_color))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(getattr(logging, str(level).upper(), logging.INFO))


def highlight(text: str, color: Optional[str] = None) -> str:
    """Wrap text in a colorama color for stdout summaries."""
    if color is None or not sys.stdout.isatty():
        return text
    return f"{getattr(Fore, color.upper(), '')}{text}{Style.RESET_ALL}"
