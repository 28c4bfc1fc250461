"""Type errors raised while checking processes."""

from enum import Enum
from typing import Any, Sequence


class ErrorKind(str, Enum):
    UNKNOWN_NAME = "UnknownName"
    QUALIFIER_MISMATCH = "QualifierMismatch"
    NOT_WELL_FORMED = "NotWellFormed"
    NO_SUCH_TAG = "NoSuchTag"
    ARG_SUBTYPE_FAIL = "ArgSubtypeFail"
    WEIGHT_INFINITE = "WeightInfinite"
    ENV_CONFLICT = "EnvConflict"
    LINEAR_UNUSED = "LinearUnused"
    SPLIT_FAIL = "SplitFail"
    DUAL_MISMATCH = "DualMismatch"
    REC_VAR_MISMATCH = "RecVarMismatch"


class ProcessTypeError(Exception):
    """A rejection: one kind, the path to the offending subterm, a message.

    Rendered as ``kind @ path : message``.
    """

    def __init__(self, kind: ErrorKind, message: str, path: Sequence[str] = ()):
        self.kind = kind
        self.message = message
        self.path = tuple(path)
        super().__init__(self.render())

    def at(self, path: Sequence[str]) -> "ProcessTypeError":
        """Copy of this error located at ``path`` unless it already has one."""
        if self.path:
            return self
        return ProcessTypeError(self.kind, self.message, path)

    @property
    def location(self) -> str:
        return "/".join(self.path) or "-"

    def render(self) -> str:
        return f"{self.kind.value} @ {self.location} : {self.message}"

    def to_record(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "path": list(self.path),
            "message": self.message,
        }

    def __str__(self) -> str:
        return self.render()
