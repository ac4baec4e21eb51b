"""Flag configurations, Fock-Goncharov charts, cluster flips and degenerations of Hitchin representations."""

from .errors import (
    DimensionError,
    EmptyWordError,
    FlagforgeError,
    GenericityError,
    HypothesisError,
    IndeterminateError,
    NotMutableError,
    PositivityError,
    PrecisionError,
    SchemaError,
    SingularBasisError,
    SingularError,
    StructureError,
    TopologyError,
)

__version__ = "0.1.0"
