"""Exception hierarchy shared by every module."""


class FlagforgeError(Exception):
    """Base class for all library errors."""


class DimensionError(FlagforgeError):
    pass


class SingularBasisError(FlagforgeError):
    pass


class SingularError(FlagforgeError, ZeroDivisionError):
    pass


class GenericityError(FlagforgeError):
    """A determinant in a ratio vanished: the flags are not in general position."""


class PositivityError(FlagforgeError):
    pass


class NotMutableError(FlagforgeError):
    """Mutation requested at a vertex that is not interior."""


class IndeterminateError(FlagforgeError, ArithmeticError):
    """Sum of opposite infinite scaled limits."""


class TopologyError(FlagforgeError):
    pass


class StructureError(FlagforgeError):
    pass


class EmptyWordError(FlagforgeError):
    pass


class HypothesisError(FlagforgeError):
    pass


class PrecisionError(FlagforgeError):
    def __init__(self, message, suggested_bits=None):
        super().__init__(message)
        self.suggested_bits = suggested_bits


class SchemaError(FlagforgeError):
    """Input document does not match the expected JSON layout."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
