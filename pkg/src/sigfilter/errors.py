"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity.

    ``code`` is a short machine-readable tag used by the CLI error line.
    """

    code = "domain"

    def __init__(self, detail, code=None):
        super().__init__(detail)
        if code is not None:
            self.code = code
        self.detail = detail


class FilterTooExtremeError(DomainError):
    """The selection probability underflows to zero."""

    code = "filter_too_extreme"


class NoSelectedDrawsError(DomainError):
    """A simulation kept no draws after filtering."""

    code = "no_selected_draws"


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    code = "quadrature"

    def __init__(self, detail, achieved=None):
        super().__init__(detail)
        self.detail = detail
        self.achieved = achieved
