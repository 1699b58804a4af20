#!/usr/bin/env python3
"""
Error types for OODN-KE
One hierarchy for every layer, so the CLI can catch OODNError and map it to an exit code
"""

from typing import Optional, Sequence, Tuple


class OODNError(Exception):
    """Base class for all knowledge-extraction errors"""


# Expressions

class ExpressionError(OODNError):
    """Malformed expression source or tree"""


class ExpressionSyntaxError(ExpressionError):
    """Source text does not follow the s-expression grammar"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnknownOperatorError(ExpressionError):
    """Operator symbol outside the grammar"""


class ArityError(ExpressionError):
    """Operator applied to the wrong number of operands"""


class ExpressionTypeError(ExpressionError):
    """Boolean node used under arithmetic, or arithmetic used as a predicate"""


class EvaluationError(OODNError):
    """Expression could not be evaluated under a binding"""


class UnboundSlotError(EvaluationError):
    """A property reference or free variable has no value in the binding"""

    def __init__(self, slot: str):
        super().__init__(f"Unbound slot: {slot}")
        self.slot = slot


class DivisionByZeroError(EvaluationError):
    """Division (or negative power) of zero"""


class UnitMismatchError(EvaluationError):
    """Quantities with incompatible units were added or compared"""


# Class model

class ModelError(OODNError):
    """Ill-formed member, type or class"""


class ProjectionIndexError(ModelError, IndexError):
    """extract_type was asked for a projection the class does not have"""


class DuplicateMemberError(ModelError):
    """Two members of one member set share a key"""


# Exploiters

class ExploiterError(OODNError):
    """Union or intersection could not be applied"""


class EmptyOperandsError(ExploiterError):
    """Exploiter called without classes"""


class DuplicateTypeError(ExploiterError):
    """Two different types carry the same name"""


# Lattice

class LatticeError(OODNError):
    """Closure or lattice query failed"""


class LimitExceededError(LatticeError):
    """Too many basic classes for the configured closure cap"""


class UnknownNodeError(LatticeError, KeyError):
    """Node name is not part of the lattice"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "Unknown node"


class NonUniqueBoundError(LatticeError):
    """A least upper / greatest lower bound is not unique"""

    def __init__(self, message: str, antichain: Sequence[str]):
        super().__init__(f"{message}: {', '.join(antichain)}")
        self.antichain: Tuple[str, ...] = tuple(antichain)


# Knowledge base documents

class KBFormatError(OODNError):
    """Document does not follow the oodn-kb/1 format"""


class SchemaError(KBFormatError):
    """Field missing or of the wrong shape"""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class UnsupportedVersionError(KBFormatError):
    """Document version other than oodn-kb/1"""


class DuplicateClassError(KBFormatError):
    """Two classes in one document share a name"""


class DanglingReferenceError(KBFormatError):
    """Compressed projection points outside the shared-body table"""
