"""Endpoint types, processes and the algebra over types."""

from copyless_check.core.duality import DualityError, dual, is_dual_pair
from copyless_check.core.process import (
    Choice,
    Close,
    Idle,
    Name,
    OpenLinear,
    OpenUnrestricted,
    Par,
    Param,
    ProcVar,
    Receive,
    ReceiveBranch,
    RecProc,
    Send,
    free_names,
)
from copyless_check.core.subtyping import (
    equivalent,
    subtype,
    subtype_derivation,
    subtype_oracle,
    subtype_qualified,
)
from copyless_check.core.types import (
    Branch,
    End,
    ExternalChoice,
    InternalChoice,
    Qualifier,
    Rec,
    Type,
    TypeSyntaxError,
    Var,
    alpha_equal,
    lin,
    un,
    unfold,
)
from copyless_check.core.weights import INFINITE, ZERO, Weight, weight, weight_oracle
from copyless_check.core.wellformed import ContextOverlapError, check_wf

__all__ = [
    "Branch",
    "Choice",
    "Close",
    "ContextOverlapError",
    "DualityError",
    "End",
    "ExternalChoice",
    "INFINITE",
    "Idle",
    "InternalChoice",
    "Name",
    "OpenLinear",
    "OpenUnrestricted",
    "Par",
    "Param",
    "ProcVar",
    "Qualifier",
    "Rec",
    "RecProc",
    "Receive",
    "ReceiveBranch",
    "Send",
    "Type",
    "TypeSyntaxError",
    "Var",
    "Weight",
    "ZERO",
    "alpha_equal",
    "check_wf",
    "dual",
    "equivalent",
    "free_names",
    "is_dual_pair",
    "lin",
    "subtype",
    "subtype_derivation",
    "subtype_oracle",
    "subtype_qualified",
    "un",
    "unfold",
    "weight",
    "weight_oracle",
]
