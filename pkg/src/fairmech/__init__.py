"""Truthful randomized fair division of indivisible items, in exact arithmetic."""

from .bivalued import BiValuedMechanism
from .exceptions import (
    BlockedEdgeError,
    FairDivisionError,
    InvariantViolation,
    MalformedInputError,
    RegularityError,
    ScaleLimitError,
    UnboundedError,
)
from .fairness import check_alpha_mms, check_ef1, check_ef_uv, check_pareto_fractional, check_pareto_integral, check_prop1
from .mech2 import TwoAgentMechanism
from .mech3 import ThreeAgentMechanism
from .mechn import EnvyBoundedMechanism, Prop1MMSMechanism
from .model import FractionalAllocation, Instance, IntegralAllocation, Lottery
from .realize import decompose_or_refute

__all__ = [
    "BiValuedMechanism",
    "BlockedEdgeError",
    "EnvyBoundedMechanism",
    "FairDivisionError",
    "FractionalAllocation",
    "Instance",
    "IntegralAllocation",
    "InvariantViolation",
    "Lottery",
    "MalformedInputError",
    "Prop1MMSMechanism",
    "RegularityError",
    "ScaleLimitError",
    "ThreeAgentMechanism",
    "TwoAgentMechanism",
    "UnboundedError",
    "check_alpha_mms",
    "check_ef1",
    "check_ef_uv",
    "check_pareto_fractional",
    "check_pareto_integral",
    "check_prop1",
    "decompose_or_refute",
]

__version__ = "0.1.0"
