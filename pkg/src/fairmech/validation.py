"""Input validation helpers in the style of ``sklearn.utils.validation``."""

from __future__ import annotations

import random

from .exceptions import MalformedInputError
from .model import FractionalAllocation, Instance, IntegralAllocation

__all__ = ["check_valuations", "check_allocation", "check_fractional", "check_random_state"]


def check_valuations(values, n_agents=None, min_agents=1) -> Instance:
    """Coerce ``values`` into an :class:`Instance`.

    Accepts an Instance, an instance JSON dict, or any nested sequence
    (including numpy arrays) of numbers or ``"a/b"`` strings.
    """
    if isinstance(values, Instance):
        inst = values
    elif isinstance(values, dict):
        inst = Instance.from_dict(values)
    else:
        try:
            rows = [list(row) for row in values]
        except TypeError as exc:
            raise MalformedInputError("valuations must be a 2-d table") from exc
        inst = Instance.from_values(rows)
    if n_agents is not None and inst.n != n_agents:
        raise MalformedInputError(f"expected {n_agents} agents, got {inst.n}")
    if inst.n < min_agents:
        raise MalformedInputError(f"expected at least {min_agents} agents, got {inst.n}")
    return inst


def check_allocation(allocation, instance: Instance) -> IntegralAllocation:
    """Coerce and validate an integral allocation against ``instance``."""
    if isinstance(allocation, dict):
        allocation = allocation.get("bundles")
        if allocation is None:
            raise MalformedInputError("allocation JSON needs a 'bundles' list")
    bundles = allocation.bundles if isinstance(allocation, IntegralAllocation) else allocation
    alloc = IntegralAllocation.from_bundles(bundles, instance.m)
    if alloc.n != instance.n:
        raise MalformedInputError(f"expected {instance.n} bundles, got {alloc.n}")
    return alloc


def check_fractional(shares, instance: Instance) -> FractionalAllocation:
    if isinstance(shares, FractionalAllocation):
        frac = shares
    elif isinstance(shares, dict):
        frac = FractionalAllocation.from_dict(shares)
    else:
        frac = FractionalAllocation.from_shares(shares)
    if frac.n != instance.n or frac.m != instance.m:
        raise MalformedInputError("fractional allocation shape does not match the instance")
    return frac


def check_random_state(seed) -> random.Random:
    """Turn ``None``, an int or a ``random.Random`` into a ``random.Random``."""
    if seed is None or isinstance(seed, int):
        return random.Random(seed)
    if isinstance(seed, random.Random):
        return seed
    raise MalformedInputError(f"{seed!r} cannot seed a random.Random")
