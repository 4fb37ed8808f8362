"""
Utility modules for the THz indoor coverage lab.
"""

from .config import Config, get_config, reload_config
from .logger import LoggerMixin, get_logger, log_execution_time, setup_logger

__all__ = [
    "Config",
    "get_config",
    "reload_config",
    "LoggerMixin",
    "get_logger",
    "log_execution_time",
    "setup_logger",
]
