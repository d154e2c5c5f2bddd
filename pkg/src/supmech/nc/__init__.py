"""Exact symbolic kernel for presented *-superalgebras."""

from .algebra import (
    EVEN,
    ODD,
    AlgebraPresentation,
    Generator,
    NcPoly,
    PresentationError,
    RelationError,
    from_words,
    jacobi_residual,
    normal_form,
    quantum_pb,
    star,
    substitute,
    supercommutator,
)
from .coefficient import IMAG, ONE, ZERO, Coefficient
from .parser import ParseError, UnknownNameError, parse_expr
from .presfile import load_presentation, loads_presentation

__all__ = [
    "EVEN",
    "ODD",
    "IMAG",
    "ONE",
    "ZERO",
    "AlgebraPresentation",
    "Coefficient",
    "Generator",
    "NcPoly",
    "ParseError",
    "PresentationError",
    "RelationError",
    "UnknownNameError",
    "from_words",
    "jacobi_residual",
    "load_presentation",
    "loads_presentation",
    "normal_form",
    "parse_expr",
    "quantum_pb",
    "star",
    "substitute",
    "supercommutator",
]
