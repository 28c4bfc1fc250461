"""Tests for the Rich-based logger module."""

import json

from copyless_check.utils.logger import (
    _ARROW,
    _BULLET,
    _CHECK,
    _CROSS,
    Logger,
    get_logger,
    reset_logger,
)


class TestLogger:
    """Tests for Logger class."""

    def test_create_logger(self):
        """Test creating a logger instance."""
        logger = Logger()
        assert logger.verbose is False
        assert logger.quiet is False
        assert logger.console is not None

    def test_success_output(self, capsys):
        """Test success message output."""
        Logger().success("accepted")
        captured = capsys.readouterr()
        assert "accepted" in captured.out
        assert _CHECK in captured.out

    def test_error_output(self, capsys):
        """Test error message output."""
        Logger().error("LinearUnused @ main")
        captured = capsys.readouterr()
        assert "LinearUnused @ main" in captured.out
        assert _CROSS in captured.out

    def test_markup_is_escaped(self, capsys):
        """Test brackets in messages are printed literally."""
        Logger().error("Leak([b])")
        assert "Leak([b])" in capsys.readouterr().out

    def test_warning_output(self, capsys):
        """Test warning message output."""
        Logger().warning("extra branch n")
        captured = capsys.readouterr()
        assert "extra branch n" in captured.out
        assert "!" in captured.out

    def test_info_output(self, capsys):
        """Test info message output."""
        Logger().info("Seed: 0")
        captured = capsys.readouterr()
        assert "Seed: 0" in captured.out
        assert _BULLET in captured.out

    def test_step_output(self, capsys):
        """Test step message output."""
        Logger().step("Reducing")
        captured = capsys.readouterr()
        assert "Reducing" in captured.out
        assert _ARROW in captured.out

    def test_debug_output_verbose(self, capsys):
        """Test debug message output in verbose mode."""
        Logger(verbose=True).debug("1. R-Rec")
        assert "1. R-Rec" in capsys.readouterr().out

    def test_debug_output_not_verbose(self, capsys):
        """Test debug message is hidden when not verbose."""
        Logger(verbose=False).debug("1. R-Rec")
        assert "R-Rec" not in capsys.readouterr().out

    def test_header_output(self, capsys):
        """Test header message output."""
        Logger().header("Checking main.proc")
        assert "Checking main.proc" in capsys.readouterr().out

    def test_blank_output(self, capsys):
        """Test blank line output."""
        Logger().blank()
        assert capsys.readouterr().out == "\n"

    def test_table_output(self, capsys):
        """Test table output."""
        Logger().table(
            title="Violations",
            columns=["Choices", "Verdict"],
            rows=[["0 0", "Leak"], ["1", "Fault"]],
        )
        captured = capsys.readouterr()
        assert "Violations" in captured.out
        assert "Choices" in captured.out
        assert "Leak" in captured.out
        assert "Fault" in captured.out

    def test_result_is_plain(self, capsys):
        """Test result prints the bare text."""
        Logger().result("?m(lin end).end")
        assert capsys.readouterr().out == "?m(lin end).end\n"

    def test_record_is_one_json_line(self, capsys):
        """Test record prints a single parseable line."""
        Logger().record({"outcome": "Accepted", "payload": {"steps": 5}})
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0]) == {"outcome": "Accepted", "payload": {"steps": 5}}

    def test_status_context_manager(self):
        """Test status yields a real Status object when no progress is active."""
        with Logger().status("Exploring...") as status:
            assert status is not None


class TestQuietLogger:
    """Tests for the structured-output mode."""

    def test_human_output_dropped(self, capsys):
        """Test success, info and tables stay off stdout."""
        logger = Logger(quiet=True)
        logger.success("accepted")
        logger.info("Seed: 0")
        logger.header("Running")
        logger.table("Fixtures", ["Fixture"], [["a.proc"]])
        logger.blank()
        captured = capsys.readouterr()
        assert captured.out == ""
        assert captured.err == ""

    def test_errors_go_to_stderr(self, capsys):
        """Test errors and warnings move to stderr."""
        logger = Logger(quiet=True)
        logger.error("WeightInfinite")
        logger.warning("stopped at 2 configurations")
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "WeightInfinite" in captured.err
        assert "stopped at 2 configurations" in captured.err

    def test_record_still_printed(self, capsys):
        """Test structured records reach stdout."""
        Logger(quiet=True).record({"exitCode": 0})
        assert json.loads(capsys.readouterr().out) == {"exitCode": 0}

    def test_status_is_silent(self):
        """Test status yields nothing in quiet mode."""
        with Logger(quiet=True).status("Exploring...") as status:
            assert status is None


class TestProgress:
    """Tests for progress bar and status degradation."""

    def test_progress_context_manager(self):
        """Test progress bar creates, advances, and completes."""
        logger = Logger()
        with logger.progress("Checking fixtures", total=3) as (progress, task_id):
            for _ in range(3):
                progress.update(task_id, advance=1)
            assert progress.tasks[0].completed == 3

    def test_progress_sets_active_flag(self):
        """Test _progress_active flag lifecycle."""
        logger = Logger()
        assert logger._progress_active is False
        with logger.progress("Checking fixtures", total=1) as (progress, task_id):
            assert logger._progress_active is True
            progress.update(task_id, advance=1)
        assert logger._progress_active is False

    def test_status_degrades_during_progress(self, capsys):
        """Test status prints a step line when a progress bar is active."""
        logger = Logger()
        with logger.progress("Checking fixtures", total=1) as (progress, task_id):
            with logger.status("Reducing...") as status:
                assert status is None
            progress.update(task_id, advance=1)


class TestGetLogger:
    """Tests for get_logger and reset_logger."""

    def test_get_logger_singleton(self):
        """Test get_logger returns the same instance."""
        assert get_logger() is get_logger()

    def test_get_logger_flags(self):
        """Test get_logger passes its flags to a new logger."""
        logger = get_logger(verbose=True, quiet=True)
        assert logger.verbose is True
        assert logger.quiet is True

    def test_reset_logger(self):
        """Test reset_logger creates new instance."""
        logger1 = get_logger()
        reset_logger()
        assert get_logger() is not logger1
