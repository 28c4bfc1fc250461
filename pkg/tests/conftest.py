"""Pytest fixtures for copyless-check tests."""

from pathlib import Path

import pytest

from copyless_check.config import settings as settings_module
from copyless_check.frontend.parser import SourceProgram, parse
from copyless_check.utils.logger import reset_logger

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def reset_globals():
    """Reset the global logger and settings around each test."""
    reset_logger()
    settings_module._settings = None
    yield
    reset_logger()
    settings_module._settings = None


@pytest.fixture
def fixtures_dir() -> Path:
    """Directory of the bundled .proc fixtures."""
    return FIXTURES_DIR


@pytest.fixture
def load_fixture():
    """Parse a bundled fixture by stem."""

    def _load(stem: str) -> SourceProgram:
        return parse((FIXTURES_DIR / f"{stem}.proc").read_text(encoding="utf-8"))

    return _load


@pytest.fixture
def pingpong_source() -> str:
    """A well-typed two-party exchange."""
    return """\
type PingPong = !Ping().?Pong().end;

main =
  open(a: PingPong, b: dual PingPong).
  ( a!Ping().a?Pong().close(a)
  | b?Ping().b!Pong().close(b) );
"""


@pytest.fixture
def leaky_source() -> str:
    """Allocates a channel and drops both ends."""
    return "open(a: end, b: end).0\n"


@pytest.fixture
def source_file(tmp_path):
    """Write a source text to a temporary .proc file."""

    def _write(text: str, name: str = "main.proc") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
