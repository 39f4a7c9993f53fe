"""Configuration management module."""

from .settings import Settings, SettingsValidationError, get_settings, max_dimension
from .defaults import DEFAULT_CONFIG

__all__ = ["Settings", "SettingsValidationError", "get_settings", "max_dimension", "DEFAULT_CONFIG"]
