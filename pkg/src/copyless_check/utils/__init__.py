"""Utility modules for copyless-check."""

from copyless_check.utils.logger import Logger, get_logger, reset_logger

__all__ = ["Logger", "get_logger", "reset_logger"]
