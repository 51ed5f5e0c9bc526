class ValidationError(ValueError):
    """Input violates a documented precondition (bad file, signature mismatch, ...)."""


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured budget."""

    def __init__(self, what: str, needed, budget):
        super().__init__(f"{what}: needs {needed} > budget {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


DEFAULT_BUDGET = 10 ** 7
