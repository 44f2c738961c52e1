"""Exception types shared across the library.

All rejections raise a subclass of BrlabError so callers (and the CLI,
which maps them to exit codes) can distinguish bad parameters from
resource-budget violations and quadrature failures.
"""


class BrlabError(Exception):
    """Base class for all library errors."""


class DomainError(BrlabError, ValueError):
    """A parameter is outside the documented domain of an operation."""


class NyquistError(BrlabError, ValueError):
    """A multiplier's support would exceed the representable frequency ball."""


class BudgetError(BrlabError, RuntimeError):
    """A computation exceeds the configured memory/size budget.

    ``required`` carries the lattice-point count the request would need.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class QuadratureError(BrlabError, RuntimeError):
    """A quadrature could not meet its accuracy or resolution contract.

    ``required`` carries the node count that would be needed, when known.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required
