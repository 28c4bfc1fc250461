"""Tests for process terms, free names and substitution."""

import pytest

from copyless_check.core.process import (
    Close,
    Idle,
    Name,
    NameKind,
    OpenLinear,
    OpenUnrestricted,
    Par,
    ProcessBinding,
    ProcVar,
    Receive,
    ReceiveBranch,
    RecProc,
    Send,
    TypeBinding,
    ValueBinding,
    analyze_process_names,
    free_names,
    rename_name,
    subst_process,
)
from copyless_check.core.types import End, Var
from copyless_check.frontend.parser import parse_process, parse_type


class TestName:
    """Tests for names."""

    def test_namespaces(self):
        """Test that a location and its pointer are distinct names."""
        assert Name.linear("a") != Name.shared("a")
        assert Name.shared("a").is_location
        assert not Name.variable("x").is_location
        assert Name.variable("x").kind is NameKind.VARIABLE

    def test_str(self):
        """Test the printed form."""
        assert str(Name.shared("a")) == "*a"
        assert str(Name.linear("a")) == "a"


class TestReceive:
    """Tests for receive sums."""

    def test_duplicate_tags_rejected(self):
        """Test that a receive cannot repeat a tag."""
        branch = ReceiveBranch("m", (), (), Idle())
        with pytest.raises(ValueError):
            Receive(Name.linear("a"), (branch, branch))

    def test_branch_lookup(self):
        """Test looking up a branch by tag."""
        process = parse_process("a?{m().0, n().0}")
        assert process.branch("n").tag == "n"
        assert process.branch("k") is None


class TestFreeNames:
    """Tests for free names and name analysis."""

    def test_open_binds_locations(self):
        """Test open binds both peers."""
        process = parse_process("open(a: end, b: end).(close(a) | close(c))")
        assert free_names(process) == {Name.linear("c")}

    def test_open_unrestricted_binds_pointer(self):
        """Test open(a: T) binds a and *a."""
        process = parse_process("open(a: rec r.!m().r).*a!m().close(a)")
        assert free_names(process) == frozenset()

    def test_receive_binds_variables(self):
        """Test received variables are bound in their branch."""
        process = parse_process("a?m(x: lin end).close(x)")
        analysis = analyze_process_names(process)
        assert analysis.fn == {Name.linear("a")}
        assert Name.variable("x") in analysis.bn

    def test_type_variables(self):
        """Test type parameters of a receive bind in parameter types."""
        process = parse_process("a?m<t>(x: lin ?k(lin t).end).close(x)")
        analysis = analyze_process_names(process)
        assert "t" in analysis.btv
        assert analysis.ftv == frozenset()

    def test_process_variables(self):
        """Test rec binds its process variable."""
        analysis = analyze_process_names(parse_process("rec X.a!m().X"))
        assert analysis.fpv == frozenset()
        assert analyze_process_names(ProcVar("X")).fpv == {"X"}


class TestSubstitution:
    """Tests for capture-avoiding substitution."""

    def test_value(self):
        """Test replacing a free variable by a location."""
        process = parse_process("a?m(x: lin end).close(x)")
        body = process.branches[0].body
        assert subst_process(
            body, ValueBinding(Name.variable("x"), Name.linear("b"))
        ) == Close(Name.linear("b"))

    def test_value_respects_binders(self):
        """Test that a bound location is not replaced."""
        process = parse_process("open(a: end, b: end).(close(a) | close(b))")
        assert rename_name(process, Name.linear("a"), Name.linear("c")) == process

    def test_value_avoids_capture_by_open(self):
        """Test that a clashing binder is renamed."""
        body = Par(Close(Name.variable("x")), Close(Name.linear("b")))
        process = OpenLinear("b", End(), "c", End(), body)
        result = subst_process(
            process, ValueBinding(Name.variable("x"), Name.linear("b"))
        )
        assert isinstance(result, OpenLinear)
        assert result.left != "b"
        assert Name.linear("b") in free_names(result)

    def test_value_avoids_capture_by_receive(self):
        """Test that a clashing received variable is renamed."""
        process = parse_process("a?m(y: lin end).c!k(x, y).0")
        outer = Name.linear("x")
        result = subst_process(process, ValueBinding(outer, Name.variable("y")))
        branch = result.branches[0]
        assert branch.variables != ("y",)
        assert Name.variable("y") in free_names(result)

    def test_type(self):
        """Test substituting a type into send type arguments."""
        process = Send(Name.linear("a"), "m", (Var("t"),), (), Idle())
        result = subst_process(process, TypeBinding("t", End()))
        assert result.tyargs == (End(),)

    def test_type_avoids_capture(self):
        """Test that a clashing receive type parameter is renamed."""
        process = parse_process("a?m<u>(x: lin ?k(lin t).end).close(x)")
        result = subst_process(process, TypeBinding("t", Var("u")))
        branch = result.branches[0]
        assert branch.typarams != ("u",)
        argument = branch.params[0].type.body.branches[0].argtypes[0].body
        assert argument == Var("u")

    def test_type_respects_binder(self):
        """Test that a bound type parameter is left alone."""
        process = parse_process("a?m<t>(x: lin ?k(lin t).end).close(x)")
        assert subst_process(process, TypeBinding("t", End())) == process

    def test_process(self):
        """Test unfolding a recursive process by substitution."""
        process = parse_process("rec X.a!m().X")
        assert isinstance(process, RecProc)
        unfolded = subst_process(process.body, ProcessBinding("X", process))
        assert unfolded == Send(Name.linear("a"), "m", (), (), process)

    def test_process_shadowed(self):
        """Test that an inner rec of the same variable is untouched."""
        inner = RecProc("X", ProcVar("X"))
        assert subst_process(inner, ProcessBinding("X", Idle())) == inner

    def test_open_unrestricted_substitution(self):
        """Test substitution under an unrestricted open."""
        process = OpenUnrestricted(
            "a", parse_type("rec r.!m().r"), Close(Name.variable("x"))
        )
        result = subst_process(
            process, ValueBinding(Name.variable("x"), Name.linear("c"))
        )
        assert result.body == Close(Name.linear("c"))
