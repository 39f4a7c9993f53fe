"""Exception hierarchy shared by every lab package."""


class LabError(Exception):
    """Base class for lab errors."""
    pass


class InvalidStateError(LabError, ValueError):
    """Operator fails a Hermiticity, positivity, trace or normalization check."""
    pass


class DimensionMismatchError(LabError, ValueError):
    """Incompatible subsystem dimensions or subsystem indices."""
    pass


class SizeCapError(LabError):
    """A configured dimension, qubit or seed cap was exceeded."""

    def __init__(self, quantity: str, value: int, cap: int):
        self.quantity = quantity
        self.value = value
        self.cap = cap
        super().__init__(f"{quantity} {value} exceeds cap {cap}")
