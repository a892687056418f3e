"""Errors shared by all numerical apps"""


class NumericalFailure(ArithmeticError):
    """A computation ran but did not produce a trustworthy result.

    `diagnostics` keeps whatever the failing routine measured (ratios,
    residuals, atom counts) so commands can still write a report.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.message = message
        self.diagnostics = diagnostics or {}

    def __str__(self):
        return self.message
