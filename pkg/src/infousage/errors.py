"""Shared exception types."""


class InputError(ValueError):
    """A caller supplied an argument outside an operation's domain."""


class ConfigurationError(ValueError):
    """An (ensemble, rule, experiment) combination is not meaningful."""


class BudgetExhaustedError(RuntimeError):
    """A query session refused a query because its information budget ran out."""

    def __init__(self, budget_spent, budget_limit):
        self.budget_spent = budget_spent
        self.budget_limit = budget_limit
        super().__init__(
            f"information budget exhausted: spent {budget_spent:.4f} nats "
            f"of a {budget_limit:.4f} nat limit"
        )
