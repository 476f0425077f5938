"""Runtime limits for exhaustive routines."""

import os

BUDGET_ENV = "FAIRMECH_ENUM_BUDGET"
DEFAULT_BUDGET = 10**6


def enumeration_budget() -> int:
    """Largest enumeration an exhaustive routine may attempt.

    Overridden by the ``FAIRMECH_ENUM_BUDGET`` environment variable.
    """
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return max(1, int(raw))
    except ValueError:
        return DEFAULT_BUDGET
