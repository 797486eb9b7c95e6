class GroupoidError(ValueError):
    """Malformed or inconsistent input data."""


class NotNormalError(GroupoidError):
    def __init__(self, msg: str, witness=None):
        super().__init__(msg)
        self.witness = witness


class GuardExceeded(RuntimeError):
    """A brute-force search would exceed its configured size guard."""

    def __init__(self, size: int, guard: int, what: str = "search space"):
        super().__init__(f"{what} of size {size} exceeds guard {guard}")
        self.size = size
        self.guard = guard
        self.what = what


class NotFound(LookupError):
    """A search that should have produced a witness came back empty."""
