"""Exception types shared across the package."""


class EgyptsumError(Exception):
    pass


class UnsupportedCapability(EgyptsumError):
    """The group (or set family) lacks a capability the operation needs."""


class InvalidSpec(EgyptsumError):
    pass


class ZeroElement(InvalidSpec):
    """A generating set would contain the identity."""


class GroupMismatch(EgyptsumError):
    pass


class SpecArityError(EgyptsumError):
    pass


class BudgetExceeded(EgyptsumError):
    def __init__(self, estimate, budget):
        super().__init__(f"work estimate {estimate} exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


class ParseError(EgyptsumError):
    pass
