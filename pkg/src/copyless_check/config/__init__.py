"""Configuration module for copyless-check."""

from copyless_check.config.settings import Settings, get_settings, reload_settings

__all__ = ["Settings", "get_settings", "reload_settings"]
