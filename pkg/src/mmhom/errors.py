"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class UnsupportedConfiguration(ValueError):
    """The requested physical configuration is not covered by the chosen method."""


class NumericalError(RuntimeError):
    """A quadrature or iterative procedure failed to converge.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (node counts, last two estimates, tolerance).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
