"""
Utility functions for the cyclophi toolkit.
"""

import os
import sys
import logging
from datetime import datetime

import colorama
from colorama import Fore, Style

DEFAULT_CACHE_DIR = ".cyclophi-cache"
SIZE_UNITS = ("B", "KB", "MB", "GB", "TB")

# Fix ANSI handling on legacy Windows consoles; a no-op elsewhere
colorama.just_fix_windows_console()


def get_cache_dir():
    """
    Resolve the cache directory from the environment.

    Returns:
        str: Value of CYCLOPHI_CACHE_DIR, or the local default.
    """
    return os.environ.get("CYCLOPHI_CACHE_DIR") or DEFAULT_CACHE_DIR


def get_default_workers():
    """
    Read the default worker count from CYCLOPHI_WORKERS.

    Returns:
        int: Worker count, at least 1.
    """
    raw = os.environ.get("CYCLOPHI_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logging.getLogger(__name__).warning(
            f"Ignoring non-integer CYCLOPHI_WORKERS={raw!r}"
        )
        return 1


def setup_directories(*directories):
    """
    Create the given directories if they don't exist.

    Args:
        *directories: Paths to create.
    """
    for directory in directories:
        if directory and not os.path.exists(directory):
            os.makedirs(directory, exist_ok=True)
            logging.getLogger(__name__).debug(f"Created directory: {directory}")


def setup_logging(log_level=logging.INFO, log_dir=None):
    """
    Set up logging configuration.

    Results go to stdout, so log records are written to stderr and, when a
    log directory is available, to a timestamped file inside it.

    Args:
        log_level: The logging level to use.
        log_dir (str): Directory for the log file; None disables the file.

    Returns:
        str: Path of the log file, or None.
    """
    handlers = [logging.StreamHandler(sys.stderr)]

    log_file = None
    if log_dir:
        setup_directories(log_dir)
        current_time = datetime.now().strftime('%Y-%m-%d_%H-%M-%S')
        log_file = os.path.join(log_dir, f"cyclophi_{current_time}.log")
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )

    if log_file:
        logging.debug(f"Logging initialized. Log file: {log_file}")
    return log_file


def paint(text, color):
    """
    Colour a status word when stdout is an interactive terminal.

    Args:
        text (str): Text to colour.
        color (str): One of 'green', 'red', 'yellow'.

    Returns:
        str: The text, wrapped in ANSI codes only for terminals.
    """
    if not sys.stdout.isatty():
        return text
    fore = {"green": Fore.GREEN, "red": Fore.RED, "yellow": Fore.YELLOW}[color]
    return f"{fore}{text}{Style.RESET_ALL}"


def format_file_size(size_in_bytes):
    """Byte count in binary units, two decimals: 1536 -> '1.50 KB'."""
    if size_in_bytes < 0:
        raise ValueError(f"size must be non-negative, got {size_in_bytes}")
    # Each unit is 2^10 of the previous one
    power = min(max(int(size_in_bytes).bit_length() - 1, 0) // 10, len(SIZE_UNITS) - 1)
    return f"{size_in_bytes / (1 << (10 * power)):.2f} {SIZE_UNITS[power]}"
