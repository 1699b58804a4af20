#!/usr/bin/env python3
"""
Class Model for OODN-KE
Members, types, homogeneous and inhomogeneous classes, type extraction,
subsumption and object validation
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import DuplicateMemberError, ModelError, ProjectionIndexError
from .expr import (
    DIMENSIONLESS,
    Binding,
    Expression,
    FreeVariable,
    Quantity,
    Unit,
    evaluate,
    normalize,
    property_refs,
    render,
)

logger = logging.getLogger(__name__)

EMPTY_CLASS_NAME = "∅"


class MemberKind(Enum):
    QUANTITATIVE = "quantitative"
    VERIFICATION = "verification"
    METHOD = "method"


@dataclass(frozen=True)
class SlotValue:
    """One value of a quantitative property: a rational or a free variable, with a unit"""

    magnitude: Union[Fraction, FreeVariable]
    unit: Unit = DIMENSIONLESS

    def __post_init__(self):
        if not isinstance(self.magnitude, FreeVariable):
            object.__setattr__(self, "magnitude", Fraction(self.magnitude))

    @property
    def symbolic(self) -> bool:
        return isinstance(self.magnitude, FreeVariable)


@dataclass(frozen=True)
class Member:
    """A property (quantitative or verification) or a method of a type"""

    key: str
    kind: MemberKind
    values: Tuple[SlotValue, ...] = ()
    predicate: Optional[Expression] = None
    asserted: int = 1
    body: Optional[Expression] = None
    result_unit: Unit = DIMENSIONLESS
    # Declaring type of a symbolic quantitative member
    origin: Optional[str] = None
    fingerprint: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.key:
            raise ModelError("Member key must not be empty")

        if self.kind is MemberKind.QUANTITATIVE:
            object.__setattr__(self, "values", tuple(self.values))
            if not self.symbolic:
                object.__setattr__(self, "origin", None)
            payload = (self.values, self.origin)
        elif self.kind is MemberKind.VERIFICATION:
            if self.predicate is None or not self.predicate.boolean:
                raise ModelError(f"Verification member {self.key!r} needs a boolean predicate")
            if self.asserted not in (0, 1):
                raise ModelError(f"Asserted value of {self.key!r} must be 0 or 1")
            object.__setattr__(self, "predicate", normalize(self.predicate))
            object.__setattr__(self, "origin", None)
            payload = (self.predicate, self.asserted)
        else:
            if self.body is None or self.body.boolean:
                raise ModelError(f"Method {self.key!r} needs an arithmetic body")
            object.__setattr__(self, "body", normalize(self.body))
            object.__setattr__(self, "origin", None)
            payload = (self.body, self.result_unit)

        object.__setattr__(self, "fingerprint", (self.key, self.kind.value, payload))

    @classmethod
    def quantitative(cls, key: str, values: Iterable[SlotValue], origin: Optional[str] = None) -> "Member":
        return cls(key, MemberKind.QUANTITATIVE, values=tuple(values), origin=origin)

    @classmethod
    def verification(cls, key: str, predicate: Expression, asserted: int = 1) -> "Member":
        return cls(key, MemberKind.VERIFICATION, predicate=predicate, asserted=asserted)

    @classmethod
    def method(cls, key: str, body: Expression, result_unit: Unit = DIMENSIONLESS) -> "Member":
        return cls(key, MemberKind.METHOD, body=body, result_unit=result_unit)

    @property
    def is_property(self) -> bool:
        return self.kind is not MemberKind.METHOD

    @property
    def symbolic(self) -> bool:
        return any(v.symbolic for v in self.values)

    @property
    def expression(self) -> Optional[Expression]:
        return self.predicate if self.kind is MemberKind.VERIFICATION else self.body

    def with_origin(self, origin: str) -> "Member":
        return replace(self, origin=origin)

    def describe(self) -> str:
        """Short human-readable form for table output"""
        if self.kind is MemberKind.QUANTITATIVE:
            shown = ", ".join(
                f"{render(v.magnitude) if v.symbolic else v.magnitude} {v.unit.render()}" for v in self.values
            )
            return f"{self.key} = ({shown})"
        if self.kind is MemberKind.VERIFICATION:
            return f"{self.key}: {render(self.predicate)} = {self.asserted}"
        return f"{self.key}() = {render(self.body)} [{self.result_unit.render()}]"


def member_equal(a: Member, b: Member) -> bool:
    """Same key, same kind, identical canonical content"""
    return a.fingerprint == b.fingerprint


def _canonical_position(member: Member) -> Tuple[int, str]:
    return (0 if member.is_property else 1, member.key)


class MemberSet:
    """Immutable member collection with unique keys, properties before methods, then by key"""

    def __init__(self, members: Iterable[Member] = ()):
        ordered = sorted(members, key=_canonical_position)
        by_key: Dict[str, Member] = {}
        for member in ordered:
            if member.key in by_key:
                raise DuplicateMemberError(f"Duplicate member key: {member.key}")
            by_key[member.key] = member
        self._members: Tuple[Member, ...] = tuple(ordered)
        self._by_key = by_key
        self._fingerprint = frozenset(m.fingerprint for m in ordered)

    def __iter__(self) -> Iterator[Member]:
        return iter(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, key: object) -> bool:
        return key in self._by_key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MemberSet):
            return NotImplemented
        return self._fingerprint == other._fingerprint

    def __hash__(self) -> int:
        return hash(self._fingerprint)

    def __repr__(self) -> str:
        return f"MemberSet({list(self.keys())})"

    @property
    def fingerprint(self) -> FrozenSet[tuple]:
        return self._fingerprint

    def keys(self) -> List[str]:
        return [m.key for m in self._members]

    def get(self, key: str) -> Optional[Member]:
        return self._by_key.get(key)

    @property
    def properties(self) -> List[Member]:
        return [m for m in self._members if m.is_property]

    @property
    def methods(self) -> List[Member]:
        return [m for m in self._members if not m.is_property]

    def common(self, other: "MemberSet") -> "MemberSet":
        """Members of self with a member_equal counterpart in other"""
        return MemberSet(m for m in self._members if m.fingerprint in other._fingerprint)

    def without(self, other: "MemberSet") -> "MemberSet":
        return MemberSet(m for m in self._members if m.fingerprint not in other._fingerprint)

    def merged(self, other: "MemberSet") -> "MemberSet":
        return MemberSet(self._members + other._members)

    def issubset(self, other: "MemberSet") -> bool:
        return self._fingerprint <= other._fingerprint


def _as_member_set(members) -> MemberSet:
    return members if isinstance(members, MemberSet) else MemberSet(members)


@dataclass(frozen=True)
class TypeSpec:
    """A type of objects: specification (properties) plus signature (methods)"""

    name: str
    members: MemberSet

    def __post_init__(self):
        stamped = [
            m.with_origin(self.name) if m.symbolic and m.origin is None else m
            for m in _as_member_set(self.members)
        ]
        object.__setattr__(self, "members", MemberSet(stamped))

    @property
    def fingerprint(self) -> FrozenSet[tuple]:
        return self.members.fingerprint

    @property
    def external_refs(self) -> FrozenSet[str]:
        """Property keys referenced by expressions but not declared in this type"""
        declared = {m.key for m in self.members if m.kind is MemberKind.QUANTITATIVE}
        referenced = set()
        for member in self.members:
            if member.expression is not None:
                referenced.update(key for key, _ in property_refs(member.expression))
        return frozenset(referenced - declared)


class ProvenanceKind(Enum):
    BASIC = "basic"
    UNION = "union"
    INTERSECTION = "intersection"


@dataclass(frozen=True)
class Provenance:
    """How a class came to be: declared, or the union/intersection of named basics"""

    kind: ProvenanceKind
    constituents: Tuple[str, ...]

    @classmethod
    def basic(cls, name: str) -> "Provenance":
        return cls(ProvenanceKind.BASIC, (name,))


@dataclass(frozen=True)
class Projection:
    name: str
    members: MemberSet

    def __post_init__(self):
        object.__setattr__(self, "members", _as_member_set(self.members))


@dataclass(frozen=True)
class ClassSpec:
    """Homogeneous (no projections) or inhomogeneous (core plus two or more projections) class"""

    name: str
    core: MemberSet
    projections: Tuple[Projection, ...] = ()
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        object.__setattr__(self, "core", _as_member_set(self.core))
        object.__setattr__(self, "projections", tuple(self.projections))
        if self.provenance is None:
            object.__setattr__(self, "provenance", Provenance.basic(self.name))

        if len(self.projections) == 1:
            raise ModelError(f"Inhomogeneous class {self.name} needs at least 2 projections")
        names = [p.name for p in self.projections]
        if len(set(names)) != len(names):
            raise ModelError(f"Projection names of {self.name} are not unique: {names}")
        core_keys = set(self.core.keys())
        for projection in self.projections:
            clash = core_keys.intersection(projection.members.keys())
            if clash:
                raise ModelError(
                    f"Projection {projection.name} of {self.name} repeats core keys: {sorted(clash)}"
                )

    @classmethod
    def homogeneous(cls, type_spec: TypeSpec, provenance: Optional[Provenance] = None) -> "ClassSpec":
        return cls(type_spec.name, type_spec.members, (), provenance)

    @property
    def is_homogeneous(self) -> bool:
        return not self.projections

    @property
    def is_empty(self) -> bool:
        return self.name == EMPTY_CLASS_NAME

    @cached_property
    def types(self) -> Tuple[TypeSpec, ...]:
        """Types described by the class, in projection order"""
        if self.is_homogeneous:
            return (TypeSpec(self.name, self.core),)
        return tuple(TypeSpec(p.name, self.core.merged(p.members)) for p in self.projections)

    @cached_property
    def fingerprint(self) -> FrozenSet[FrozenSet[tuple]]:
        return frozenset(t.fingerprint for t in self.types)

    @property
    def member_count(self) -> int:
        return len(self.core) + sum(len(p.members) for p in self.projections)

    def renamed(self, name: str, provenance: Optional[Provenance] = None) -> "ClassSpec":
        if self.is_homogeneous:
            # The single type takes the class name
            return ClassSpec(name, self.core, (), provenance or self.provenance)
        return replace(self, name=name, provenance=provenance or self.provenance)


def empty_class(provenance: Optional[Provenance] = None) -> ClassSpec:
    """Distinguished class with zero members"""
    return ClassSpec(EMPTY_CLASS_NAME, MemberSet(), (), provenance)


@dataclass(frozen=True)
class ObjectInstance:
    """An object of a declared class with concrete slot values"""

    name: str
    class_name: str
    slots: Mapping[str, Tuple[Quantity, ...]] = field(default_factory=dict)
    variables: Mapping[str, Quantity] = field(default_factory=dict)


def extract_type(c: ClassSpec, i: int) -> TypeSpec:
    """The i-th type (1-based): core members plus projection i"""
    count = len(c.types)
    if not 1 <= i <= count:
        raise ProjectionIndexError(f"Class {c.name} describes {count} type(s), no projection {i}")
    return c.types[i - 1]


def is_subtype(t1: TypeSpec, t2: TypeSpec) -> bool:
    """Every property and method of t1 is present in t2"""
    return t1.members.issubset(t2.members)


def is_subclass(c1: ClassSpec, c2: ClassSpec) -> bool:
    """Every type of c1 is a subtype of some type of c2"""
    return all(any(is_subtype(a, b) for b in c2.types) for a in c1.types)


def object_binding(obj: ObjectInstance, type_spec: TypeSpec) -> Binding:
    """Bind the object's values; concrete values declared by the type take precedence"""
    slots: Dict[Tuple[str, int], Quantity] = {}
    variables: Dict[str, Quantity] = dict(obj.variables)
    for key, quantities in obj.slots.items():
        for index, quantity in enumerate(quantities, 1):
            slots[(key, index)] = quantity

    for member in type_spec.members:
        if member.kind is not MemberKind.QUANTITATIVE:
            continue
        for index, value in enumerate(member.values, 1):
            if not value.symbolic:
                slots[(member.key, index)] = Quantity(value.magnitude, value.unit)
                continue
            bound = slots.get((member.key, index))
            if bound is None:
                bound = variables.get(value.magnitude.name)
            if bound is not None:
                slots[(member.key, index)] = bound
                variables.setdefault(value.magnitude.name, bound)

    return Binding(slots, variables)


def validate_object(obj: ObjectInstance, type_spec: TypeSpec) -> bool:
    """True when every verification predicate evaluates to its asserted value"""
    binding = object_binding(obj, type_spec)
    for member in type_spec.members:
        if member.kind is not MemberKind.VERIFICATION:
            continue
        if bool(evaluate(member.predicate, binding)) != bool(member.asserted):
            logger.debug(f"{obj.name} fails {member.key} of {type_spec.name}")
            return False
    return True
