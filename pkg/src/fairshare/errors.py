"""Exception hierarchy shared by every module."""


class FairShareError(Exception):
    """Base class for all library errors."""


class InvalidInstance(FairShareError, ValueError):
    pass


class NegativeValue(InvalidInstance):
    def __init__(self, agent, item):
        super().__init__(f"negative value at agent {agent}, item {item}")
        self.agent = agent
        self.item = item


class EmptyAgents(InvalidInstance):
    def __init__(self):
        super().__init__("an instance needs at least one agent")


class InvalidParameter(FairShareError, ValueError):
    pass


class IndexOutOfRange(FairShareError, IndexError):
    pass


class BudgetExceeded(FairShareError):
    def __init__(self, needed, budget):
        super().__init__(f"MMS search needs {needed} partitions, budget is {budget}")
        self.needed = needed
        self.budget = budget


class LpError(FairShareError):
    pass


class LpInfeasible(LpError):
    pass


class LpUnbounded(LpError):
    pass


class HintInfeasible(LpError):
    pass


class NoSaturatingMatching(FairShareError):
    pass


class MatchingNotFound(FairShareError):
    pass


class InvariantViolation(FairShareError, AssertionError):
    """A guarantee the algorithms promise failed to hold; always a bug."""
