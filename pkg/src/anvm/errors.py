"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class SeriesNotConverged(ArithmeticError):
    """The moment series did not meet its tolerance within the term budget.

    ``partial`` carries the last partial value of P_C so callers can still
    report it.
    """

    def __init__(self, message, partial=None, terms_used=0):
        super().__init__(message)
        self.partial = partial
        self.terms_used = terms_used
