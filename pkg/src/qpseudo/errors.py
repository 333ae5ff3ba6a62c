"""Exception hierarchy shared by every module."""


class MidyError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MidyError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotCoprime(DomainError):
    pass


class NotADivisor(DomainError):
    pass


class ModuliNotCoprime(DomainError):
    pass


class HypothesisViolated(DomainError):
    """A theorem's hypotheses do not hold for the given input."""


class OracleBoundExceeded(DomainError):
    """Input too large for an exhaustive oracle."""


class FactorizationBudgetExceeded(MidyError, RuntimeError):
    def __init__(self, n: int, budget: int):
        super().__init__(f"could not factor {n} within {budget} iterations")
        self.n = n
        self.budget = budget


class PostconditionViolated(MidyError, AssertionError):
    """A proven identity failed to hold; indicates a bug or a false theorem."""
