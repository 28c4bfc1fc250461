"""Tests for endpoint types and substitution."""

import pytest

from copyless_check.core.types import (
    Branch,
    End,
    ExternalChoice,
    InternalChoice,
    Qualifier,
    Rec,
    TypeSyntaxError,
    Var,
    alpha_equal,
    expose,
    free_type_vars,
    freshen,
    lin,
    size,
    subst_inner,
    subst_type,
    un,
    unfold,
)


def send(tag, *args, typarams=(), then=End()):
    return InternalChoice((Branch(tag, typarams, tuple(args), then),))


def recv(tag, *args, typarams=(), then=End()):
    return ExternalChoice((Branch(tag, typarams, tuple(args), then),))


class TestConstruction:
    """Tests for structural invariants checked on construction."""

    def test_rec_must_be_contractive(self):
        """Test that rec a.a is rejected."""
        with pytest.raises(TypeSyntaxError, match="contractive"):
            Rec("a", Var("a"))

    def test_rec_guarded_by_inner_rec_binder(self):
        """Test that rec a.rec b.a is rejected."""
        with pytest.raises(TypeSyntaxError):
            Rec("a", Rec("b", Var("a")))

    def test_rec_with_other_variable_is_fine(self):
        """Test that rec a.b is contractive."""
        assert Rec("a", Var("b")).body == Var("b")

    def test_duplicate_tags_rejected(self):
        """Test that a choice cannot repeat a tag."""
        with pytest.raises(TypeSyntaxError, match="duplicate tags"):
            InternalChoice((Branch("m"), Branch("m")))

    def test_empty_choice_rejected(self):
        """Test that a choice needs a branch."""
        with pytest.raises(TypeSyntaxError):
            ExternalChoice(())

    def test_duplicate_type_parameters_rejected(self):
        """Test that a branch cannot bind a type parameter twice."""
        with pytest.raises(TypeSyntaxError):
            Branch("m", ("a", "a"))

    def test_choice_branch_lookup(self):
        """Test looking up a branch by tag."""
        choice = InternalChoice((Branch("m"), Branch("n")))
        assert choice.tags == frozenset({"m", "n"})
        assert choice.branch("n") == Branch("n")
        assert choice.branch("k") is None


class TestQualifier:
    """Tests for the qualifier preorder."""

    def test_un_below_lin(self):
        """Test un <= lin but not lin <= un."""
        assert Qualifier.UN.leq(Qualifier.LIN)
        assert Qualifier.UN.leq(Qualifier.UN)
        assert Qualifier.LIN.leq(Qualifier.LIN)
        assert not Qualifier.LIN.leq(Qualifier.UN)

    def test_helpers(self):
        """Test lin and un constructors."""
        assert lin(End()).is_linear
        assert not un(End()).is_linear


class TestVariables:
    """Tests for free variables and size."""

    def test_free_type_vars(self):
        """Test that type parameters bind inside arguments."""
        term = recv("m", lin(Var("a")), typarams=("a",), then=Var("b"))
        assert free_type_vars(term) == frozenset({"b"})

    def test_rec_binds_its_variable(self):
        """Test that rec binds its variable."""
        assert free_type_vars(Rec("a", send("m", then=Var("a")))) == frozenset()

    def test_size_counts_argument_bodies(self):
        """Test node count including arguments."""
        # ?m(lin end).end: choice, argument end, continuation end
        assert size(recv("m", lin(End()))) == 3
        assert size(End()) == 1


class TestSubstitution:
    """Tests for substitution and unfolding."""

    def test_unfold(self):
        """Test one unfolding of rec a.!m().a."""
        term = Rec("a", send("m", then=Var("a")))
        assert unfold(term) == send("m", then=term)

    def test_unfold_non_rec_raises(self):
        """Test unfolding a choice."""
        with pytest.raises(TypeSyntaxError):
            unfold(End())

    def test_expose_strips_rec(self):
        """Test that expose reaches a choice."""
        term = Rec("a", recv("m", then=Var("a")))
        assert isinstance(expose(term), ExternalChoice)

    def test_substitution_avoids_capture(self):
        """Test that a clashing type parameter is renamed."""
        term = send("m", lin(Var("a")), typarams=("b",))
        result = subst_type(term, Var("b"), "a")
        branch = result.branches[0]
        assert branch.typarams != ("b",)
        assert branch.argtypes[0].body == Var("b")

    def test_substitution_respects_binders(self):
        """Test that a bound variable is not replaced."""
        term = Rec("a", send("m", then=Var("a")))
        assert subst_type(term, End(), "a") == term

    def test_inner_substitution_skips_top_level(self):
        """Test that inner substitution only touches arguments."""
        term = send("m", lin(Var("a")), then=Var("a"))
        result = subst_inner(term, End(), "a")
        assert result == send("m", lin(End()), then=Var("a"))


class TestAlphaEquality:
    """Tests for alpha_equal and freshen."""

    def test_renamed_binders(self):
        """Test rec a.!m().a equals rec b.!m().b."""
        assert alpha_equal(
            Rec("a", send("m", then=Var("a"))), Rec("b", send("m", then=Var("b")))
        )

    def test_branch_order_ignored(self):
        """Test that choices compare as sets of branches."""
        left = InternalChoice((Branch("m"), Branch("n")))
        right = InternalChoice((Branch("n"), Branch("m")))
        assert alpha_equal(left, right)

    def test_free_variables_distinguished(self):
        """Test that distinct free variables differ."""
        assert not alpha_equal(Var("a"), Var("b"))

    def test_no_unfolding(self):
        """Test that alpha equality does not unfold recursion."""
        term = Rec("a", send("m", then=Var("a")))
        assert not alpha_equal(term, unfold(term))

    def test_freshen_preserves_meaning(self):
        """Test that freshen yields an alpha-variant with new binders."""
        term = Rec("a", recv("m", lin(Var("b")), typarams=("b",), then=Var("a")))
        renamed = freshen(term)
        assert alpha_equal(term, renamed)
        assert renamed.var != "a"
