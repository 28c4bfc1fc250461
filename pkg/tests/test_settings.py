"""Tests for settings loading."""

from copyless_check.config import settings as settings_module
from copyless_check.config.settings import Settings, get_settings, reload_settings


class TestSettings:
    """Tests for Settings.load."""

    def test_defaults(self, tmp_path):
        """Test a missing file gives the defaults."""
        settings = Settings.load(str(tmp_path / "missing.yaml"))
        assert settings.simulation.seed == 0
        assert settings.simulation.max_steps == 200
        assert settings.explore.depth == 8
        assert settings.explore.max_configurations == 100_000
        assert settings.oracle.fuel is None
        assert settings.output.json is False

    def test_load_file(self, tmp_path):
        """Test values read from YAML."""
        config = tmp_path / "config.yaml"
        config.write_text(
            "simulation:\n"
            "  seed: 42\n"
            "  max_steps: 10\n"
            "explore:\n"
            "  depth: 3\n"
            "oracle:\n"
            "  fuel: 12\n"
            "  cap: 4\n"
            "output:\n"
            "  json: true\n"
        )
        settings = Settings.load(str(config))
        assert settings.simulation.seed == 42
        assert settings.simulation.max_steps == 10
        assert settings.explore.depth == 3
        assert settings.explore.max_configurations == 100_000
        assert (settings.oracle.fuel, settings.oracle.cap) == (12, 4)
        assert settings.output.json is True

    def test_empty_sections(self, tmp_path):
        """Test empty files and empty sections fall back to defaults."""
        config = tmp_path / "config.yaml"
        config.write_text("simulation:\n")
        assert Settings.load(str(config)).simulation.max_steps == 200
        config.write_text("")
        assert Settings.load(str(config)).explore.depth == 8

    def test_default_location(self, tmp_path, monkeypatch):
        """Test config/config.yaml in the working directory is found."""
        (tmp_path / "config").mkdir()
        (tmp_path / "config" / "config.yaml").write_text("simulation:\n  seed: 9\n")
        monkeypatch.chdir(tmp_path)
        assert Settings.load().simulation.seed == 9


class TestGlobalSettings:
    """Tests for get_settings and reload_settings."""

    def test_get_settings_caches(self, tmp_path):
        """Test get_settings returns one instance."""
        first = get_settings(str(tmp_path / "missing.yaml"))
        assert get_settings() is first

    def test_reload_settings(self, tmp_path):
        """Test reload_settings replaces the cached instance."""
        first = get_settings(str(tmp_path / "missing.yaml"))
        config = tmp_path / "config.yaml"
        config.write_text("explore:\n  depth: 2\n")
        second = reload_settings(str(config))
        assert second is not first
        assert settings_module._settings is second
        assert get_settings().explore.depth == 2
