#!/usr/bin/env python3
"""
Symbolic Expressions for OODN-KE
Parsing, canonical normalization, structural equality and exact evaluation
of verification functions and methods
"""

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Mapping, Tuple, Union

from .errors import (
    ArityError,
    DivisionByZeroError,
    EvaluationError,
    ExpressionError,
    ExpressionSyntaxError,
    ExpressionTypeError,
    UnboundSlotError,
    UnitMismatchError,
    UnknownOperatorError,
)

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]

# Equality tolerance once a sine has made a value irrational
TOLERANCE = 1e-9

_UNIT_ALIASES = {"°": "deg"}
_UNIT_FACTOR = re.compile(r"^([A-Za-z_°]+)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Unit:
    """Product of base-unit symbols with integer exponents ("cm^2" is {cm: 2})"""

    factors: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        merged: Dict[str, int] = {}
        for symbol, exponent in self.factors:
            merged[symbol] = merged.get(symbol, 0) + exponent
        object.__setattr__(
            self, "factors", tuple(sorted((s, e) for s, e in merged.items() if e != 0))
        )

    @classmethod
    def parse(cls, text: str) -> "Unit":
        """Parse "cm", "deg", "cm^2", "cm*deg^-1" or "1" (dimensionless)"""
        text = text.strip()
        if text in ("", "1"):
            return cls()

        factors = []
        for part in text.split("*"):
            match = _UNIT_FACTOR.match(part.strip())
            if not match:
                raise ExpressionError(f"Malformed unit: {text!r}")
            symbol = _UNIT_ALIASES.get(match.group(1), match.group(1))
            factors.append((symbol, int(match.group(2) or 1)))
        return cls(tuple(factors))

    @property
    def dimensionless(self) -> bool:
        return not self.factors

    def __mul__(self, other: "Unit") -> "Unit":
        return Unit(self.factors + other.factors)

    def __pow__(self, exponent: int) -> "Unit":
        return Unit(tuple((s, e * exponent) for s, e in self.factors))

    def render(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(s if e == 1 else f"{s}^{e}" for s, e in self.factors)

    def __str__(self) -> str:
        return self.render()


DIMENSIONLESS = Unit()
DEGREES = Unit((("deg", 1),))


@dataclass(frozen=True)
class Quantity:
    """Magnitude with a unit; exact while the magnitude is a Fraction"""

    magnitude: Number
    unit: Unit = DIMENSIONLESS

    @property
    def exact(self) -> bool:
        return isinstance(self.magnitude, Fraction)

    def render(self) -> str:
        return f"{format_number(self.magnitude)} {self.unit.render()}"

    def __str__(self) -> str:
        return self.render()


def format_number(value: Number) -> str:
    """Render an exact rational as "p" or "p/q", a float with repr"""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


# ---------------------------------------------------------------------------
# Expression tree


class Expression:
    """Base class of expression tree nodes"""

    boolean = False

    def children(self) -> Tuple["Expression", ...]:
        return ()

    def __str__(self) -> str:
        return render(self)


def _require_arithmetic(node: str, operands: Tuple[Expression, ...]):
    for operand in operands:
        if operand.boolean:
            raise ExpressionTypeError(f"{node} cannot take a boolean operand: {render(operand)}")


@dataclass(frozen=True)
class RationalLiteral(Expression):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class FreeVariable(Expression):
    name: str


@dataclass(frozen=True)
class PropertyRef(Expression):
    """v_index(p_key(T)) — the index-th value of the property with role key"""

    key: str
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ExpressionError(f"Property index must be >= 1, got {self.index}")


@dataclass(frozen=True)
class Add(Expression):
    operands: Tuple[Expression, ...]

    def __post_init__(self):
        _require_arithmetic("+", self.operands)

    def children(self):
        return self.operands


@dataclass(frozen=True)
class Mul(Expression):
    operands: Tuple[Expression, ...]

    def __post_init__(self):
        _require_arithmetic("*", self.operands)

    def children(self):
        return self.operands


@dataclass(frozen=True)
class Sub(Expression):
    left: Expression
    right: Expression

    def __post_init__(self):
        _require_arithmetic("-", (self.left, self.right))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Div(Expression):
    left: Expression
    right: Expression

    def __post_init__(self):
        _require_arithmetic("/", (self.left, self.right))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: Expression

    def __post_init__(self):
        _require_arithmetic("pow", (self.base, self.exponent))

    def children(self):
        return (self.base, self.exponent)


@dataclass(frozen=True)
class Sin(Expression):
    """Sine of an angle given in degrees"""

    argument: Expression

    def __post_init__(self):
        _require_arithmetic("sin", (self.argument,))

    def children(self):
        return (self.argument,)


@dataclass(frozen=True)
class EqChain(Expression):
    """n-ary equality a = b = c ..., true when every operand is equal"""

    operands: Tuple[Expression, ...]
    boolean = True

    def __post_init__(self):
        _require_arithmetic("=", self.operands)

    def children(self):
        return self.operands


@dataclass(frozen=True)
class And(Expression):
    operands: Tuple[Expression, ...]
    boolean = True

    def __post_init__(self):
        for operand in self.operands:
            if not operand.boolean:
                raise ExpressionTypeError(f"and takes predicates only: {render(operand)}")

    def children(self):
        return self.operands


ZERO = RationalLiteral(Fraction(0))
ONE = RationalLiteral(Fraction(1))
MINUS_ONE = RationalLiteral(Fraction(-1))

_SYMBOLS = {Add: "+", Mul: "*", Sub: "-", Div: "/", Pow: "pow", Sin: "sin", EqChain: "=", And: "and"}

# operator -> (node type, min operands, max operands or None)
_OPERATORS = {
    "+": (Add, 2, None),
    "*": (Mul, 2, None),
    "-": (Sub, 2, 2),
    "/": (Div, 2, 2),
    "pow": (Pow, 2, 2),
    "sin": (Sin, 1, 1),
    "=": (EqChain, 2, None),
    "and": (And, 1, None),
}

# Total order on node kinds used to sort commutative operands
_RANK = {
    RationalLiteral: 0,
    FreeVariable: 1,
    PropertyRef: 2,
    Pow: 3,
    Mul: 4,
    Add: 5,
    Sin: 6,
    Sub: 7,
    Div: 8,
    EqChain: 9,
    And: 10,
}


def sort_key(e: Expression) -> tuple:
    """Deterministic total order on expression trees"""
    rank = _RANK[type(e)]
    if isinstance(e, RationalLiteral):
        return (rank, e.value)
    if isinstance(e, FreeVariable):
        return (rank, e.name)
    if isinstance(e, PropertyRef):
        return (rank, e.key, e.index)
    return (rank, tuple(sort_key(c) for c in e.children()))


def walk(e: Expression) -> Iterator[Expression]:
    """Pre-order traversal"""
    yield e
    for child in e.children():
        yield from walk(child)


def property_refs(e: Expression) -> FrozenSet[Tuple[str, int]]:
    return frozenset((n.key, n.index) for n in walk(e) if isinstance(n, PropertyRef))


def free_variables(e: Expression) -> FrozenSet[str]:
    return frozenset(n.name for n in walk(e) if isinstance(n, FreeVariable))


# ---------------------------------------------------------------------------
# Parsing and rendering

_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_INTEGER = re.compile(r"^-?\d+$")
_RATIONAL = re.compile(r"^(-?\d+)/(\d+)$")
_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")

MAX_NESTING = 100


class _Parser:
    """Recursive-descent reader over (token, offset) pairs"""

    def __init__(self, text: str):
        self.text = text
        self.tokens = [(m.group(), m.start()) for m in _TOKEN.finditer(text)]
        self.index = 0
        self.depth = 0

    def parse(self) -> Expression:
        if not self.tokens:
            raise ExpressionSyntaxError("Empty expression", 0)
        expression = self._expression()
        if self.index < len(self.tokens):
            token, offset = self.tokens[self.index]
            raise ExpressionSyntaxError(f"Unexpected token {token!r}", offset)
        return expression

    def _next(self) -> Tuple[str, int]:
        if self.index >= len(self.tokens):
            raise ExpressionSyntaxError("Unexpected end of input", len(self.text))
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _peek(self) -> str:
        if self.index >= len(self.tokens):
            raise ExpressionSyntaxError("Unexpected end of input", len(self.text))
        return self.tokens[self.index][0]

    def _expression(self) -> Expression:
        token, offset = self._next()
        if token == ")":
            raise ExpressionSyntaxError("Unexpected ')'", offset)
        if token != "(":
            return self._atom(token, offset)
        if self.depth >= MAX_NESTING:
            raise ExpressionSyntaxError(f"Nesting deeper than {MAX_NESTING} levels", offset)

        head, head_offset = self._next()
        if head in ("(", ")"):
            raise ExpressionSyntaxError("Expected operator", head_offset)
        if head == "ref":
            return self._ref(head_offset)
        if head not in _OPERATORS:
            raise UnknownOperatorError(f"Unknown operator {head!r} at offset {head_offset}")

        operands: List[Expression] = []
        self.depth += 1
        while self._peek() != ")":
            operands.append(self._expression())
        self.depth -= 1
        self.index += 1

        node_type, low, high = _OPERATORS[head]
        if len(operands) < low or (high is not None and len(operands) > high):
            expected = str(low) if low == high else f"at least {low}"
            raise ArityError(
                f"Operator {head!r} at offset {head_offset} takes {expected} operands, "
                f"got {len(operands)}"
            )
        if node_type in (Add, Mul, EqChain, And):
            return node_type(tuple(operands))
        return node_type(*operands)

    def _ref(self, offset: int) -> PropertyRef:
        key, key_offset = self._next()
        index, index_offset = self._next()
        close, _ = self._next()
        if not _IDENTIFIER.match(key):
            raise ExpressionSyntaxError(f"Invalid property key {key!r}", key_offset)
        if not _INTEGER.match(index) or int(index) < 1:
            raise ExpressionSyntaxError(f"Property index must be an integer >= 1, got {index!r}", index_offset)
        if close != ")":
            raise ArityError(f"ref at offset {offset} takes exactly 2 arguments")
        return PropertyRef(key, int(index))

    def _atom(self, token: str, offset: int) -> Expression:
        if _INTEGER.match(token):
            return RationalLiteral(Fraction(int(token)))
        match = _RATIONAL.match(token)
        if match:
            if int(match.group(2)) == 0:
                raise ExpressionSyntaxError("Zero denominator", offset)
            return RationalLiteral(Fraction(int(match.group(1)), int(match.group(2))))
        if token.startswith("var:") and _IDENTIFIER.match(token[4:]):
            return FreeVariable(token[4:])
        if token in _OPERATORS or token == "ref":
            raise ExpressionSyntaxError(f"Operator {token!r} outside operator position", offset)
        raise ExpressionSyntaxError(f"Unexpected atom {token!r}", offset)


def parse_expression(text: str) -> Expression:
    """Parse the s-expression syntax into a tree"""
    return _Parser(text).parse()


def render(e: Expression) -> str:
    """Render a tree back into the s-expression syntax"""
    if isinstance(e, RationalLiteral):
        return format_number(e.value)
    if isinstance(e, FreeVariable):
        return f"var:{e.name}"
    if isinstance(e, PropertyRef):
        return f"(ref {e.key} {e.index})"
    return f"({_SYMBOLS[type(e)]} {' '.join(render(c) for c in e.children())})"


# ---------------------------------------------------------------------------
# Canonical form


@lru_cache(maxsize=8192)
def normalize(e: Expression) -> Expression:
    """Canonical form: flattened, sorted, constant-folded, Sub and Div rewritten"""
    if isinstance(e, (RationalLiteral, FreeVariable, PropertyRef)):
        return e
    if isinstance(e, Sub):
        return normalize(Add((e.left, Mul((MINUS_ONE, e.right)))))
    if isinstance(e, Div):
        return normalize(Mul((e.left, Pow(e.right, MINUS_ONE))))
    if isinstance(e, Pow):
        return _normalize_power(normalize(e.base), normalize(e.exponent))
    if isinstance(e, Sin):
        return Sin(normalize(e.argument))
    if isinstance(e, Add):
        return _normalize_sum(e.operands)
    if isinstance(e, Mul):
        return _normalize_product(e.operands)
    if isinstance(e, EqChain):
        return EqChain(tuple(sorted((normalize(o) for o in e.operands), key=sort_key)))
    if isinstance(e, And):
        clauses = []
        for operand in e.operands:
            operand = normalize(operand)
            clauses.extend(operand.operands if isinstance(operand, And) else (operand,))
        if len(clauses) == 1:
            return clauses[0]
        return And(tuple(sorted(clauses, key=sort_key)))
    raise ExpressionError(f"Unknown expression node: {e!r}")


def _normalize_power(base: Expression, exponent: Expression) -> Expression:
    if isinstance(exponent, RationalLiteral) and exponent.value.denominator == 1:
        n = int(exponent.value)
        if n == 1:
            return base
        if n == 0:
            return ONE
        if isinstance(base, RationalLiteral) and not (base.value == 0 and n < 0):
            return RationalLiteral(base.value ** n)
    return Pow(base, exponent)


def _normalize_sum(operands: Tuple[Expression, ...]) -> Expression:
    constant = Fraction(0)
    terms: List[Expression] = []
    for operand in operands:
        operand = normalize(operand)
        for term in operand.operands if isinstance(operand, Add) else (operand,):
            if isinstance(term, RationalLiteral):
                constant += term.value
            else:
                terms.append(term)

    if not terms:
        return RationalLiteral(constant)
    if constant != 0:
        terms.append(RationalLiteral(constant))
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(sorted(terms, key=sort_key)))


def _normalize_product(operands: Tuple[Expression, ...]) -> Expression:
    constant = Fraction(1)
    factors: List[Expression] = []
    for operand in operands:
        operand = normalize(operand)
        for factor in operand.operands if isinstance(operand, Mul) else (operand,):
            if isinstance(factor, RationalLiteral):
                constant *= factor.value
            else:
                factors.append(factor)

    if constant == 0 or not factors:
        return RationalLiteral(constant)
    if constant != 1:
        factors.append(RationalLiteral(constant))
    if len(factors) == 1:
        return factors[0]
    return Mul(tuple(sorted(factors, key=sort_key)))


def expressions_equal(a: Expression, b: Expression) -> bool:
    """Structural equality of canonical forms"""
    return normalize(a) == normalize(b)


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class Binding:
    """Values for property slots (key, index) and free variables"""

    slots: Mapping[Tuple[str, int], Quantity] = field(default_factory=dict)
    variables: Mapping[str, Quantity] = field(default_factory=dict)

    def slot(self, key: str, index: int) -> Quantity:
        try:
            return self.slots[(key, index)]
        except KeyError:
            raise UnboundSlotError(f"{key}[{index}]") from None

    def variable(self, name: str) -> Quantity:
        try:
            return self.variables[name]
        except KeyError:
            raise UnboundSlotError(f"var:{name}") from None


Value = Union[Quantity, bool]

_EXACT_SINES = {
    0: Fraction(0),
    30: Fraction(1, 2),
    90: Fraction(1),
    150: Fraction(1, 2),
    180: Fraction(0),
    210: Fraction(-1, 2),
    270: Fraction(-1),
    330: Fraction(-1, 2),
}


def _sin_degrees(angle: Number) -> Number:
    if isinstance(angle, Fraction):
        reduced = angle % 360
        if reduced.denominator == 1 and int(reduced) in _EXACT_SINES:
            return _EXACT_SINES[int(reduced)]
    return math.sin(math.radians(float(angle)))


def _shared_unit(quantities: List[Quantity], action: str) -> Unit:
    """Bare numbers adopt the unit of the other operands"""
    units = {q.unit for q in quantities if not q.unit.dimensionless}
    if len(units) > 1:
        listed = ", ".join(sorted(u.render() for u in units))
        raise UnitMismatchError(f"Cannot {action} quantities in {listed}")
    return units.pop() if units else DIMENSIONLESS


def numbers_equal(a: Number, b: Number) -> bool:
    """Exact for rationals, within TOLERANCE once a float is involved"""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=TOLERANCE, abs_tol=TOLERANCE)


def values_agree(a: Value, b: Value) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    return a.unit == b.unit and numbers_equal(a.magnitude, b.magnitude)


def evaluate(e: Expression, binding: Binding) -> Value:
    """Evaluate to a Quantity, or to a bool for predicates"""
    if isinstance(e, RationalLiteral):
        return Quantity(e.value)
    if isinstance(e, FreeVariable):
        return binding.variable(e.name)
    if isinstance(e, PropertyRef):
        return binding.slot(e.key, e.index)

    if isinstance(e, And):
        return all(evaluate(o, binding) for o in e.operands)
    if isinstance(e, EqChain):
        values = [evaluate(o, binding) for o in e.operands]
        _shared_unit(values, "compare")
        first = values[0].magnitude
        return all(numbers_equal(first, v.magnitude) for v in values[1:])

    if isinstance(e, Add):
        values = [evaluate(o, binding) for o in e.operands]
        return Quantity(sum(v.magnitude for v in values), _shared_unit(values, "add"))
    if isinstance(e, Sub):
        left, right = evaluate(e.left, binding), evaluate(e.right, binding)
        return Quantity(left.magnitude - right.magnitude, _shared_unit([left, right], "subtract"))
    if isinstance(e, Mul):
        magnitude: Number = Fraction(1)
        unit = DIMENSIONLESS
        for operand in e.operands:
            value = evaluate(operand, binding)
            magnitude *= value.magnitude
            unit = unit * value.unit
        return Quantity(magnitude, unit)
    if isinstance(e, Div):
        left, right = evaluate(e.left, binding), evaluate(e.right, binding)
        if right.magnitude == 0:
            raise DivisionByZeroError(f"Division by zero in {render(e)}")
        return Quantity(left.magnitude / right.magnitude, left.unit * right.unit ** -1)
    if isinstance(e, Pow):
        return _evaluate_power(e, evaluate(e.base, binding), evaluate(e.exponent, binding))
    if isinstance(e, Sin):
        angle = evaluate(e.argument, binding)
        if not (angle.unit.dimensionless or angle.unit == DEGREES):
            raise UnitMismatchError(f"sin expects degrees, got {angle.unit.render()}")
        return Quantity(_sin_degrees(angle.magnitude))
    raise ExpressionError(f"Unknown expression node: {e!r}")


def _evaluate_power(e: Pow, base: Quantity, exponent: Quantity) -> Quantity:
    if not exponent.unit.dimensionless:
        raise UnitMismatchError(f"Exponent must be dimensionless in {render(e)}")
    n = exponent.magnitude
    if isinstance(n, float) and n.is_integer():
        n = Fraction(int(n))
    if not isinstance(n, Fraction) or n.denominator != 1:
        raise EvaluationError(f"Only integer powers are supported: {render(e)}")
    n = int(n)
    if base.magnitude == 0 and n < 0:
        raise DivisionByZeroError(f"Negative power of zero in {render(e)}")
    return Quantity(base.magnitude ** n, base.unit ** n)
