"""Tests for the CLI module."""

import json
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

from copyless_check.cli import (
    SCHEMA,
    BatchItem,
    Outcome,
    Report,
    main,
    parse_args,
    parse_batch_file,
    parse_expectations,
    run_fixture,
)
from copyless_check.config.settings import Settings


def invoke(argv):
    """Run the CLI and return its exit code."""
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    return excinfo.value.code


def record(capsys):
    """The single JSON record printed on stdout."""
    return json.loads(capsys.readouterr().out)


class TestParseArgs:
    """Tests for parse_args function."""

    def test_check_command(self):
        """Test check command parsing."""
        with patch.object(sys, "argv", ["copyless-check", "check", "main.proc"]):
            args = parse_args()
            assert args.command == "check"
            assert args.file == "main.proc"
            assert args.json is False
            assert args.verbose is False

    def test_run_with_flags(self):
        """Test run command with all flags."""
        args = parse_args(
            [
                "run",
                "main.proc",
                "--seed",
                "7",
                "--max-steps",
                "50",
                "--trace",
                "out.jsonl",
                "--unsafe",
                "--check-heap",
                "--json",
            ]
        )
        assert args.seed == 7
        assert args.max_steps == 50
        assert args.trace == "out.jsonl"
        assert args.unsafe is True
        assert args.check_heap is True
        assert args.json is True

    def test_common_options_before_command(self):
        """Test --json, -v and --config may precede the command."""
        args = parse_args(["--json", "-v", "--config", "c.yaml", "check", "main.proc"])
        assert args.command == "check"
        assert args.json is True
        assert args.verbose is True
        assert args.config == "c.yaml"

    def test_command_options_override(self):
        """Test an option after the command wins over the same one before it."""
        args = parse_args(
            ["--config", "a.yaml", "check", "f.proc", "--config", "b.yaml"]
        )
        assert args.config == "b.yaml"
        assert args.json is False

    def test_run_defaults(self):
        """Test run leaves seed and bound to the settings."""
        args = parse_args(["run", "main.proc"])
        assert args.seed is None
        assert args.max_steps is None

    def test_subtype_command(self):
        """Test subtype operands and flags."""
        args = parse_args(["subtype", "-e", "end", "end", "--oracle"])
        assert (args.left, args.right) == ("end", "end")
        assert args.expr is True
        assert args.oracle is True
        assert args.defs is None

    def test_weight_ctx(self):
        """Test weight context parsing."""
        args = parse_args(["weight", "T", "--defs", "t.proc", "--ctx", "a,b"])
        assert args.ctx == "a,b"
        assert args.defs == "t.proc"

    def test_help_flag(self):
        """Test --help flag exits cleanly."""
        with pytest.raises(SystemExit) as excinfo:
            parse_args(["--help"])
        assert excinfo.value.code == 0

    def test_missing_command(self):
        """Test a missing subcommand is a usage error with exit code 3."""
        with pytest.raises(SystemExit) as excinfo:
            parse_args([])
        assert excinfo.value.code == 3

    def test_unknown_command(self):
        """Test an unknown subcommand."""
        with pytest.raises(SystemExit) as excinfo:
            parse_args(["frobnicate"])
        assert excinfo.value.code == 3


class TestReport:
    """Tests for Report."""

    def test_exit_codes(self):
        """Test each outcome maps to its exit code."""
        codes = [Report("check", outcome).exit_code for outcome in Outcome]
        assert codes == [0, 1, 2, 3]

    def test_to_record(self):
        """Test the structured record."""
        report = Report("run", Outcome.MONITOR_VIOLATION, {"steps": 2}, "Leak({b})")
        data = json.loads(report.to_json())
        assert data == {
            "schema": SCHEMA,
            "command": "run",
            "outcome": "MonitorViolation",
            "exitCode": 2,
            "summary": "Leak({b})",
            "payload": {"steps": 2},
        }


class TestCheckCommand:
    """Tests for the check command."""

    def test_accepted(self, fixtures_dir, capsys):
        """Test a well-typed fixture."""
        assert invoke(["check", str(fixtures_dir / "pingpong.proc")]) == 0
        assert "accepted" in capsys.readouterr().out

    def test_rejected(self, fixtures_dir, capsys):
        """Test an ill-typed fixture exits with 1."""
        assert invoke(["check", str(fixtures_dir / "micidiale.proc")]) == 1
        assert "WeightInfinite" in capsys.readouterr().out

    def test_json_before_command(self, fixtures_dir, capsys):
        """Test --json given before the command switches the report."""
        assert invoke(["--json", "check", str(fixtures_dir / "pingpong.proc")]) == 0
        assert record(capsys)["outcome"] == "Accepted"

    def test_rejected_json(self, fixtures_dir, capsys):
        """Test the JSON record of a rejection."""
        path = str(fixtures_dir / "leak_idle.proc")
        assert invoke(["check", path, "--json"]) == 1
        data = record(capsys)
        assert data["outcome"] == "TypeError"
        assert data["payload"]["error"]["kind"] == "LinearUnused"
        assert data["payload"]["error"]["path"] == ["main"]

    def test_parse_error(self, source_file, capsys):
        """Test a syntax error exits with 3 and reports its position."""
        path = source_file("open(a: end")
        assert invoke(["check", str(path), "--json"]) == 3
        error = record(capsys)["payload"]["error"]
        assert error["line"] == 1
        assert error["column"] == 12

    def test_missing_file(self, tmp_path, capsys):
        """Test an unreadable file is a parse error."""
        assert invoke(["check", str(tmp_path / "missing.proc"), "--json"]) == 3
        assert "cannot read" in record(capsys)["summary"]


class TestRunCommand:
    """Tests for the run command."""

    def test_safe_run(self, fixtures_dir, capsys):
        """Test a well-typed fixture runs to OK."""
        path = str(fixtures_dir / "pingpong.proc")
        assert invoke(["run", path, "--json", "--seed", "3"]) == 0
        payload = record(capsys)["payload"]
        assert payload["seed"] == 3
        assert payload["steps"] == 5
        assert payload["verdict"]["verdict"] == "OK"
        assert payload["heapDomain"] == ["a", "b"]

    def test_checked_before_running(self, fixtures_dir, capsys):
        """Test an ill-typed program is not run."""
        assert invoke(["run", str(fixtures_dir / "micidiale.proc"), "--json"]) == 1
        assert record(capsys)["outcome"] == "TypeError"

    def test_unsafe_leak(self, fixtures_dir, capsys):
        """Test running an ill-typed program to its leak."""
        path = str(fixtures_dir / "micidiale.proc")
        assert invoke(["run", path, "--unsafe", "--json"]) == 2
        data = record(capsys)
        assert data["summary"] == "Leak({b}) after 2 steps"
        assert data["payload"]["verdict"]["locations"] == ["b"]

    def test_check_heap(self, fixtures_dir, capsys):
        """Test the heap check reports the first ill-typed heap."""
        path = str(fixtures_dir / "micidiale.proc")
        assert invoke(["run", path, "--unsafe", "--check-heap", "--json"]) == 2
        heap_check = record(capsys)["payload"]["heapCheck"]
        assert heap_check["ok"] is False
        assert heap_check["step"] == 2
        assert heap_check["condition"] == 2

    def test_check_heap_ok(self, fixtures_dir, capsys):
        """Test a well-typed run keeps a typed heap."""
        path = str(fixtures_dir / "stream.proc")
        assert invoke(["run", path, "--check-heap", "--json"]) == 0
        assert record(capsys)["payload"]["heapCheck"] == {"ok": True}

    def test_trace_file(self, fixtures_dir, tmp_path, capsys):
        """Test one JSON line per step is written."""
        trace = tmp_path / "trace.jsonl"
        path = str(fixtures_dir / "pingpong.proc")
        assert invoke(["run", path, "--trace", str(trace)]) == 0
        lines = trace.read_text(encoding="utf-8").splitlines()
        events = [json.loads(line) for line in lines]
        assert [e["step"] for e in events] == [1, 2, 3, 4, 5]
        assert events[0]["rule"] == "R-Open Linear Channel"

    def test_verbose_shows_steps(self, fixtures_dir, capsys):
        """Test -v prints every reduction."""
        assert invoke(["run", str(fixtures_dir / "pingpong.proc"), "-v"]) == 0
        assert "R-Send Linear" in capsys.readouterr().out

    def test_steps_hidden_without_verbose(self, fixtures_dir, capsys):
        """Test reductions are only listed with -v."""
        assert invoke(["run", str(fixtures_dir / "pingpong.proc")]) == 0
        assert "R-Send Linear" not in capsys.readouterr().out

    def test_program_with_assumptions(self, fixtures_dir, capsys):
        """Test a program with free names cannot run."""
        assert invoke(["run", str(fixtures_dir / "cons.proc"), "--json"]) == 3
        assert "assumptions" in record(capsys)["summary"]

    def test_seed_from_config(self, fixtures_dir, tmp_path, capsys):
        """Test the seed default comes from the config file."""
        config = tmp_path / "config.yaml"
        config.write_text("simulation:\n  seed: 5\noutput:\n  json: true\n")
        path = str(fixtures_dir / "choice.proc")
        assert invoke(["run", path, "--config", str(config)]) == 0
        assert record(capsys)["payload"]["seed"] == 5


class TestExploreCommand:
    """Tests for the explore command."""

    def test_safe(self, fixtures_dir, capsys):
        """Test exploring a well-typed fixture."""
        path = str(fixtures_dir / "choice.proc")
        assert invoke(["explore", path, "--json"]) == 0
        payload = record(capsys)["payload"]
        assert payload["violations"] == []
        assert payload["truncated"] is False

    def test_violation_path(self, fixtures_dir, capsys):
        """Test a violation is reported with the choices leading to it."""
        path = str(fixtures_dir / "micidiale.proc")
        argv = ["explore", path, "--unsafe", "--depth", "3", "--json"]
        assert invoke(argv) == 2
        payload = record(capsys)["payload"]
        assert payload["configurations"] == 3
        (violation,) = payload["violations"]
        assert violation["choices"] == [0, 0]
        assert violation["verdict"] == "Leak"


class TestTypeCommands:
    """Tests for subtype, weight and dual."""

    def test_subtype_by_definition(self, fixtures_dir, capsys):
        """Test subtyping between definitions of a source file."""
        defs = str(fixtures_dir / "subtyping_pair.proc")
        assert invoke(["subtype", "T", "S", "--defs", defs]) == 0
        assert capsys.readouterr().out.strip() == "true"
        assert invoke(["subtype", "S", "T", "--defs", defs]) == 1
        assert capsys.readouterr().out.strip() == "false"

    def test_subtype_oracle(self, fixtures_dir, capsys):
        """Test the oracle agrees on the same pair."""
        defs = str(fixtures_dir / "subtyping_pair.proc")
        assert invoke(["subtype", "T", "S", "--defs", defs, "--oracle"]) == 0
        assert capsys.readouterr().out.strip() == "true"

    def test_subtype_expressions(self, capsys):
        """Test subtyping between type expressions."""
        assert invoke(["subtype", "-e", "end", "end", "--json"]) == 0
        payload = record(capsys)["payload"]
        assert payload["holds"] is True
        assert payload["left"] == "end"

    def test_subtype_mixed_qualifiers(self, capsys):
        """Test one qualified and one bare operand."""
        assert invoke(["subtype", "-e", "lin end", "end"]) == 3

    def test_definition_needs_defs(self, capsys):
        """Test a definition name without --defs."""
        assert invoke(["subtype", "T", "S", "--json"]) == 3
        assert "--defs" in record(capsys)["summary"]

    def test_unknown_definition(self, fixtures_dir, capsys):
        """Test a name the source does not define."""
        defs = str(fixtures_dir / "subtyping_pair.proc")
        assert invoke(["subtype", "T", "U", "--defs", defs]) == 3

    def test_weight(self, capsys):
        """Test the weight of a nested receiver."""
        assert invoke(["weight", "-e", "?m(lin ?m(lin end).end).end"]) == 0
        assert capsys.readouterr().out.strip() == "2"

    def test_weight_infinite(self, capsys):
        """Test an endpoint that can receive itself weighs inf."""
        assert invoke(["weight", "-e", "rec a.?m(lin a).end"]) == 0
        assert capsys.readouterr().out.strip() == "inf"

    def test_weight_ctx(self, capsys):
        """Test variables in --ctx weigh zero."""
        assert invoke(["weight", "-e", "?m(lin a).end", "--ctx", "a", "--json"]) == 0
        assert record(capsys)["payload"]["weight"] == 1

    def test_weight_oracle(self, capsys):
        """Test the oracle computes the same weight."""
        argv = ["weight", "-e", "?m(lin ?m(lin end).end).end", "--oracle"]
        assert invoke(argv) == 0
        assert capsys.readouterr().out.strip() == "2"

    def test_weight_of_definition(self, fixtures_dir, capsys):
        """Test the weight of a named definition."""
        defs = str(fixtures_dir / "micidiale.proc")
        assert invoke(["weight", "T2", "--defs", defs]) == 0
        assert capsys.readouterr().out.strip() == "inf"

    def test_dual(self, capsys):
        """Test the dual of a type expression."""
        assert invoke(["dual", "-e", "!m(lin end).?n().end"]) == 0
        assert capsys.readouterr().out.strip() == "?m(lin end).!n().end"

    def test_dual_undefined(self, capsys):
        """Test the dual of a free type variable."""
        assert invoke(["dual", "-e", "alpha", "--json"]) == 1
        data = record(capsys)
        assert data["outcome"] == "TypeError"
        assert "alpha" in data["payload"]["error"]

    def test_type_syntax_error(self, capsys):
        """Test a malformed type expression."""
        assert invoke(["dual", "-e", "!m(.end"]) == 3


class TestParseExpectations:
    """Tests for fixture headers."""

    def test_all_keys(self):
        """Test every expectation key."""
        expectation = parse_expectations(
            "# expect-check: WeightInfinite\n"
            "# expect-run: Leak({b})\n"
            "# expect-steps: 2\n"
            "# expect-subtype: T S true\n"
            "main = 0;\n"
        )
        assert expectation.check == "WeightInfinite"
        assert expectation.run == "Leak({b})"
        assert expectation.steps == 2
        assert expectation.subtype == [("T", "S", True)]
        assert not expectation.empty

    def test_no_headers(self):
        """Test a source without expectations."""
        assert parse_expectations("# a comment\n0\n").empty

    def test_unknown_key(self):
        """Test an unknown expectation."""
        with pytest.raises(ValueError, match="unknown expectation 'colour'"):
            parse_expectations("# expect-colour: red\n")

    def test_bad_steps(self):
        """Test a non-numeric step count."""
        with pytest.raises(ValueError, match="Line 2"):
            parse_expectations("# ok\n# expect-steps: many\n")

    def test_bad_subtype(self):
        """Test a malformed subtype expectation."""
        with pytest.raises(ValueError):
            parse_expectations("# expect-subtype: T S maybe\n")


class TestParseBatchFile:
    """Tests for parse_batch_file function."""

    def test_directory(self, fixtures_dir):
        """Test a directory lists its .proc files in order."""
        items = parse_batch_file(fixtures_dir)
        names = [item.path.name for item in items]
        assert names == sorted(names)
        assert "pingpong.proc" in names

    def test_text_file(self, tmp_path):
        """Test a text list with comments and blank lines."""
        batch_file = tmp_path / "batch.txt"
        batch_file.write_text("# fixtures\n\na.proc\n/abs/b.proc\n")
        items = parse_batch_file(batch_file)
        assert [item.path for item in items] == [
            tmp_path / "a.proc",
            Path("/abs/b.proc"),
        ]

    def test_json_file(self, tmp_path):
        """Test a JSON array of paths and objects."""
        batch_file = tmp_path / "batch.json"
        batch_file.write_text(json.dumps(["a.proc", {"file": "b.proc"}]))
        items = parse_batch_file(batch_file)
        assert [item.path.name for item in items] == ["a.proc", "b.proc"]

    def test_json_not_array(self, tmp_path):
        """Test a JSON object instead of an array."""
        batch_file = tmp_path / "batch.json"
        batch_file.write_text(json.dumps({"file": "a.proc"}))
        with pytest.raises(ValueError, match="must contain an array"):
            parse_batch_file(batch_file)

    def test_json_missing_file(self, tmp_path):
        """Test an object without a file field."""
        batch_file = tmp_path / "batch.json"
        batch_file.write_text(json.dumps([{"path": "a.proc"}]))
        with pytest.raises(ValueError, match="Entry 1"):
            parse_batch_file(batch_file)

    def test_invalid_json(self, tmp_path):
        """Test malformed JSON."""
        batch_file = tmp_path / "batch.json"
        batch_file.write_text("[unclosed")
        with pytest.raises(ValueError, match="Invalid JSON"):
            parse_batch_file(batch_file)

    def test_nonexistent(self, tmp_path):
        """Test a missing batch path."""
        with pytest.raises(ValueError, match="Batch path not found"):
            parse_batch_file(tmp_path / "nonexistent.txt")


class TestBatch:
    """Tests for running fixtures against their expectations."""

    def test_fixture_as_expected(self, fixtures_dir):
        """Test a fixture whose check and run match its headers."""
        result = run_fixture(BatchItem(fixtures_dir / "micidiale.proc"), Settings())
        assert result.success
        assert result.outcomes == ["WeightInfinite", "Leak({b}) in 2"]

    def test_fixture_not_as_expected(self, source_file):
        """Test a fixture whose check disagrees with its header."""
        path = source_file("# expect-check: Accepted\nopen(a: end, b: end).0\n")
        result = run_fixture(BatchItem(path), Settings())
        assert not result.success
        assert result.error == "check: expected Accepted, got LinearUnused"

    def test_fixture_without_expectations(self, source_file):
        """Test a fixture that declares nothing."""
        result = run_fixture(BatchItem(source_file("0\n")), Settings())
        assert result.error == "no expectations declared"

    def test_bundled_fixtures(self, fixtures_dir, capsys):
        """Test every bundled fixture behaves as its header says."""
        assert invoke(["batch", str(fixtures_dir), "--json"]) == 0
        results = record(capsys)["payload"]["results"]
        assert results
        assert all(r["success"] for r in results), results

    def test_failures_exit_with_one(self, source_file, capsys):
        """Test a batch with a failing fixture."""
        source_file("# expect-check: Accepted\nopen(a: end, b: end).0\n", "bad.proc")
        listing = source_file("bad.proc\n", "batch.txt")
        assert invoke(["batch", str(listing)]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_missing_batch(self, tmp_path):
        """Test a missing batch path is a parse error."""
        assert invoke(["batch", str(tmp_path / "none.txt")]) == 3
