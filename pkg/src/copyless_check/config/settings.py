"""Settings management for copyless-check."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml


@dataclass
class SimulationSettings:
    """Defaults for ``run``."""

    seed: int = 0
    max_steps: int = 200


@dataclass
class ExploreSettings:
    """Defaults for ``explore``."""

    depth: int = 8
    max_configurations: int = 100_000


@dataclass
class OracleSettings:
    """Bounds of the fixpoint oracles; None means the computed default."""

    fuel: Optional[int] = None
    cap: Optional[int] = None


@dataclass
class OutputSettings:
    json: bool = False


@dataclass
class Settings:
    """Application settings."""

    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    explore: ExploreSettings = field(default_factory=ExploreSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    @classmethod
    def load(cls, config_path: Optional[str] = None) -> "Settings":
        """Load settings from YAML config file.

        Args:
            config_path: Path to config file. If None, searches default locations.

        Returns:
            Settings instance with loaded or default values.
        """
        settings = cls()

        if config_path is None:
            config_path = cls._find_config_file()

        if config_path and Path(config_path).exists():
            settings = cls._load_from_file(config_path)

        return settings

    @classmethod
    def _find_config_file(cls) -> Optional[str]:
        """Search for config file in default locations."""
        search_paths = [
            Path.cwd() / "config" / "config.yaml",
            Path.cwd() / "copyless.yaml",
            Path.home() / ".config" / "copyless-check" / "config.yaml",
            Path.home() / ".copyless-check" / "config.yaml",
        ]

        for path in search_paths:
            if path.exists():
                return str(path)

        return None

    @classmethod
    def _load_from_file(cls, config_path: str) -> "Settings":
        """Load settings from a YAML file."""
        with open(config_path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}

        simulation_data = data.get("simulation") or {}
        explore_data = data.get("explore") or {}
        oracle_data = data.get("oracle") or {}
        output_data = data.get("output") or {}

        return cls(
            simulation=SimulationSettings(
                seed=simulation_data.get("seed", 0),
                max_steps=simulation_data.get("max_steps", 200),
            ),
            explore=ExploreSettings(
                depth=explore_data.get("depth", 8),
                max_configurations=explore_data.get("max_configurations", 100_000),
            ),
            oracle=OracleSettings(
                fuel=oracle_data.get("fuel"),
                cap=oracle_data.get("cap"),
            ),
            output=OutputSettings(
                json=bool(output_data.get("json", False)),
            ),
        )


# Global settings instance
_settings: Optional[Settings] = None


def get_settings(config_path: Optional[str] = None) -> Settings:
    """Get or create global settings instance.

    Args:
        config_path: Optional path to config file.

    Returns:
        Settings instance.
    """
    global _settings
    if _settings is None:
        _settings = Settings.load(config_path)
    return _settings


def reload_settings(config_path: Optional[str] = None) -> Settings:
    """Force reload settings from config file.

    Args:
        config_path: Optional path to config file.

    Returns:
        New Settings instance.
    """
    global _settings
    _settings = Settings.load(config_path)
    return _settings
