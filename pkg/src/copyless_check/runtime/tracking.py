"""Follows a run at the type level and validates every heap it produces."""

from __future__ import annotations

from typing import Optional

from copyless_check.checker.environment import TypeEnv
from copyless_check.checker.errors import ProcessTypeError
from copyless_check.checker.heap import HeapVerdict, MessageSpec, check_heap, tail
from copyless_check.core.duality import DualityError, dual
from copyless_check.core.process import (
    Name,
    OpenLinear,
    OpenUnrestricted,
    Send,
)
from copyless_check.core.types import InternalChoice, Type, expose, lin, subst_many, un
from copyless_check.runtime.engine import Configuration, Rule, StepEffect
from copyless_check.runtime.heap import Message
from copyless_check.utils.logger import get_logger


class HeapTracker:
    """Keeps one type per allocated name and checks the heap after each step.

    Use an instance as the ``observer`` of ``run`` or ``replay``.
    """

    def __init__(self) -> None:
        self.types: dict[Name, Type] = {}
        self.verdicts: list[HeapVerdict] = []

    def __call__(self, config: Configuration, effect: StepEffect) -> None:
        self.observe(effect)
        self.verdicts.append(self.verify(config))

    @property
    def first_failure(self) -> Optional[tuple[int, HeapVerdict]]:
        """Step number and verdict of the first ill-typed heap, if any."""
        for i, verdict in enumerate(self.verdicts, start=1):
            if not verdict.ok:
                return i, verdict
        return None

    def observe(self, effect: StepEffect) -> None:
        leaf = effect.leaf
        rule = effect.redex.rule
        if rule is Rule.OPEN_LINEAR:
            assert isinstance(leaf, OpenLinear)
            left, right = effect.allocated
            self.types[Name.linear(left)] = lin(leaf.left_type)
            self.types[Name.linear(right)] = lin(leaf.right_type)
        elif rule is Rule.OPEN_UNRESTRICTED:
            assert isinstance(leaf, OpenUnrestricted)
            (loc,) = effect.allocated
            self.types[Name.linear(loc)] = lin(leaf.type)
            try:
                self.types[Name.shared(loc)] = un(dual(leaf.type))
            except DualityError:
                get_logger().debug(f"no unrestricted type for *{loc}")
        elif rule is Rule.SEND_LINEAR:
            assert isinstance(leaf, Send)
            self._advance_sender(leaf)
        elif rule is Rule.RECEIVE and effect.message is not None:
            assert effect.target is not None
            self._advance_receiver(Name.linear(effect.target), effect.message)

    def _advance_sender(self, leaf: Send) -> None:
        current = self.types.get(leaf.subject)
        if current is None:
            return
        exposed = expose(current.body)
        if not isinstance(exposed, InternalChoice):
            del self.types[leaf.subject]
            return
        branch = exposed.branch(leaf.tag)
        if branch is None or len(branch.typarams) != len(leaf.tyargs):
            del self.types[leaf.subject]
            return
        mapping = dict(zip(branch.typarams, leaf.tyargs))
        self.types[leaf.subject] = lin(subst_many(branch.continuation, mapping))

    def _advance_receiver(self, subject: Name, message: Message) -> None:
        current = self.types.get(subject)
        argtypes = [self.types.get(a) for a in message.args]
        if current is None or any(t is None for t in argtypes):
            return
        spec = MessageSpec(
            message.tag,
            message.tyargs,
            tuple(t for t in argtypes if t is not None),
        )
        try:
            self.types[subject] = lin(tail(current.body, [spec]))
        except ProcessTypeError as e:
            get_logger().debug(f"lost track of {subject}: {e.message}")
            del self.types[subject]

    def environments(self, config: Configuration) -> tuple[TypeEnv, TypeEnv]:
        """Split the tracked types into unowned heap cells and owned names."""
        owned = {n for n in config.free_names() if n in self.types}
        gamma = TypeEnv({n: self.types[n] for n in owned})
        gamma0 = TypeEnv(
            {
                Name.linear(loc): self.types[Name.linear(loc)]
                for loc in config.heap
                if Name.linear(loc) not in owned and Name.linear(loc) in self.types
            }
        )
        return gamma0, gamma

    def verify(self, config: Configuration) -> HeapVerdict:
        gamma0, gamma = self.environments(config)
        return check_heap(gamma0, gamma, config.heap)
