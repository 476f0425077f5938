"""Estimator-style base class shared by the mechanisms."""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .model import FractionalAllocation, Instance, IntegralAllocation, expected_utility
from .validation import check_random_state, check_valuations

__all__ = ["BaseMechanism"]


class BaseMechanism(BaseEstimator):
    """A randomized allocation mechanism.

    ``fit(values)`` computes the fractional outcome ``fractional_`` and the
    lottery ``lottery_`` implementing it.  ``fractional_rule`` is the
    stateless map from reports to the fractional outcome, which is what
    truthfulness is judged on.  Subclasses set ``n_agents`` when the
    mechanism is defined only for a fixed number of agents.
    """

    n_agents: int | None = None

    def _validate(self, values) -> Instance:
        return check_valuations(values, n_agents=self.n_agents)

    def _run(self, instance: Instance):
        """Return ``(fractional, lottery, extras)``; ``extras`` become fitted attributes."""
        raise NotImplementedError

    def fractional_rule(self, values) -> FractionalAllocation:
        return self._run(self._validate(values))[0]

    def fit(self, values, y=None):
        instance = self._validate(values)
        fractional, lottery, extras = self._run(instance)
        self.instance_ = instance
        self.fractional_ = fractional
        self.lottery_ = lottery
        self.expected_utilities_ = expected_utility(instance, fractional)
        for key, value in extras.items():
            setattr(self, key, value)
        return self

    def sample(self, random_state=None) -> IntegralAllocation:
        """Draw one allocation from the fitted lottery."""
        check_is_fitted(self, "lottery_")
        return self.lottery_.sample(check_random_state(random_state))

    def fit_sample(self, values, random_state=None) -> IntegralAllocation:
        return self.fit(values).sample(random_state)
