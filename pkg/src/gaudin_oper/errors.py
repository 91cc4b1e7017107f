class GaudinError(Exception):
    """Base class for errors raised by this package."""


class FieldMismatchError(GaudinError, TypeError):
    """Operands live over different scalar fields (exact rational vs complex)."""


class DegenerateInputError(GaudinError, ValueError):
    """Points that must be distinct coincide (or nearly so in the complex field)."""


class PoleCollisionError(DegenerateInputError):
    pass


class ResourceCapError(GaudinError):
    """A configured size cap (dimension, number of Bethe roots, ...) was exceeded."""


class InputError(GaudinError, ValueError):
    """Malformed problem data."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer
