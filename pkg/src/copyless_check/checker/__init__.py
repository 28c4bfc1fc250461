"""Typing rules for processes and heaps."""

from copyless_check.checker.environment import TypeEnv
from copyless_check.checker.errors import ErrorKind, ProcessTypeError
from copyless_check.checker.heap import HeapVerdict, check_heap, tail
from copyless_check.checker.rules import CheckResult, typecheck

__all__ = [
    "CheckResult",
    "ErrorKind",
    "HeapVerdict",
    "ProcessTypeError",
    "TypeEnv",
    "check_heap",
    "tail",
    "typecheck",
]
