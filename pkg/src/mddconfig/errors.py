"""Exception types shared across the package."""


class ModelError(ValueError):
    """Raised when a model, catalogue, or diagram document fails to parse
    or violates a structural rule.

    ``position`` holds a character offset into the offending text when the
    error came out of the expression parser, else None.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class LimitExceeded(RuntimeError):
    """A configured resource cap was hit (node store, enumeration cap,
    expansion size, compile time budget)."""


class QueryError(ValueError):
    """An online query referenced an unknown variable/value or asked for
    something the current session mode cannot answer."""


class TransitionError(QueryError):
    """A session operation is illegal in the current state: assigning a
    variable that already holds a value, or unassigning one that does not."""
