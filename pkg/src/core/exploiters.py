#!/usr/bin/env python3
"""
Exploiters for OODN-KE
Union and intersection of classes, core extraction, maximality filtering
and the cross-evaluation equivalence check
"""

import logging
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DuplicateTypeError, EmptyOperandsError, ExploiterError
from .expr import Binding, Quantity, evaluate, values_agree
from .model import (
    ClassSpec,
    Member,
    MemberKind,
    MemberSet,
    Projection,
    Provenance,
    ProvenanceKind,
    TypeSpec,
    empty_class,
    is_subtype,
)

logger = logging.getLogger(__name__)

UNION_SUFFIX = "∪"
INTERSECTION_SUFFIX = "∩"

__all__ = [
    "MemberSet",
    "union",
    "intersection",
    "assemble_class",
    "cross_equivalence_check",
    "sample_binding",
    "rank_key",
    "rank_names",
]


def rank_key(name: str, ranking: Optional[Mapping[str, int]] = None) -> Tuple[int, str]:
    """Basics in knowledge-base order, every other name after them lexicographically"""
    ranking = ranking or {}
    return (ranking.get(name, len(ranking)), name)


def rank_names(names: Iterable[str], ranking: Optional[Mapping[str, int]] = None) -> List[str]:
    return sorted(set(names), key=lambda n: rank_key(n, ranking))


def _joined(names: Iterable[str], suffix: str, ranking: Optional[Mapping[str, int]]) -> str:
    return "".join(rank_names(names, ranking)) + suffix


def _constituents(classes: Sequence[ClassSpec], ranking: Optional[Mapping[str, int]]) -> Tuple[str, ...]:
    names = [name for c in classes for name in c.provenance.constituents]
    return tuple(rank_names(names, ranking))


def _proper_subtype(a: TypeSpec, b: TypeSpec) -> bool:
    return a.fingerprint != b.fingerprint and is_subtype(a, b)


def _distinct_types(types: Iterable[TypeSpec], ranking: Optional[Mapping[str, int]]) -> List[TypeSpec]:
    """Merge identical types under their lowest-ranked name; reject one name with two contents"""
    by_name: Dict[str, TypeSpec] = {}
    by_fingerprint: Dict[FrozenSet[tuple], TypeSpec] = {}
    for t in types:
        seen = by_name.get(t.name)
        if seen is not None and seen.fingerprint != t.fingerprint:
            raise DuplicateTypeError(f"Two different types are named {t.name}")
        by_name[t.name] = t

        kept = by_fingerprint.get(t.fingerprint)
        if kept is None or rank_key(t.name, ranking) < rank_key(kept.name, ranking):
            by_fingerprint[t.fingerprint] = t
    return list(by_fingerprint.values())


def _maximal(types: List[TypeSpec], ranking: Optional[Mapping[str, int]]) -> List[TypeSpec]:
    survivors = [t for t in types if not any(_proper_subtype(t, other) for other in types)]
    return sorted(survivors, key=lambda t: rank_key(t.name, ranking))


def _matching_operand(classes: Sequence[ClassSpec], fingerprint: FrozenSet) -> Optional[ClassSpec]:
    """An operand that already describes exactly the resulting types"""
    for c in classes:
        if c.fingerprint == fingerprint:
            return c
    return None


def assemble_class(name: str, types: Sequence[TypeSpec], provenance: Provenance) -> ClassSpec:
    """Core = members common to all types, one projection of leftovers per type"""
    if len(types) == 1:
        return ClassSpec(name, types[0].members, (), provenance)

    core = types[0].members
    for t in types[1:]:
        core = core.common(t.members)
    projections = tuple(Projection(t.name, t.members.without(core)) for t in types)
    return ClassSpec(name, core, projections, provenance)


def union(classes: Sequence[ClassSpec], ranking: Optional[Mapping[str, int]] = None) -> ClassSpec:
    """Class describing every type of the operands, subsumed types absorbed"""
    classes = list(classes)
    if not classes:
        raise EmptyOperandsError("union needs at least one class")
    if len(classes) == 1:
        return classes[0]

    types = _distinct_types((t for c in classes for t in c.types), ranking)
    survivors = _maximal(types, ranking)
    provenance = Provenance(ProvenanceKind.UNION, _constituents(classes, ranking))

    fingerprint = frozenset(t.fingerprint for t in survivors)
    operand = _matching_operand(classes, fingerprint)
    if operand is not None:
        return operand
    if len(survivors) == 1:
        return ClassSpec.homogeneous(survivors[0], provenance)

    name = _joined((t.name for t in survivors), UNION_SUFFIX, ranking)
    return assemble_class(name, survivors, provenance)


def intersection(classes: Sequence[ClassSpec], ranking: Optional[Mapping[str, int]] = None) -> ClassSpec:
    """Class describing the maximal common subtypes of one type drawn from each operand"""
    classes = list(classes)
    if not classes:
        raise EmptyOperandsError("intersection needs at least one class")
    if len(classes) == 1:
        return classes[0]

    # Rejects one name with two contents across operands
    _distinct_types((t for c in classes for t in c.types), ranking)

    candidates: List[TypeSpec] = []
    for combination in product(*(c.types for c in classes)):
        common = combination[0].members
        for t in combination[1:]:
            common = common.common(t.members)
        names = rank_names((t.name for t in combination), ranking)
        name = names[0] if len(names) == 1 else "".join(names) + INTERSECTION_SUFFIX
        candidates.append(TypeSpec(name, common))

    survivors = _maximal(_distinct_types(candidates, ranking), ranking)
    provenance = Provenance(ProvenanceKind.INTERSECTION, _constituents(classes, ranking))

    if len(survivors) == 1 and not survivors[0].members:
        logger.warning(f"Empty intersection of {', '.join(c.name for c in classes)}")
        return empty_class(provenance)

    operand = _matching_operand(classes, frozenset(t.fingerprint for t in survivors))
    if operand is not None:
        return operand

    name = _joined((c.name for c in classes), INTERSECTION_SUFFIX, ranking)
    return assemble_class(name, survivors, provenance)


def sample_binding(type_spec: TypeSpec, rng: np.random.Generator) -> Binding:
    """Concrete declared values plus random integers 1..99 for each free variable"""
    slots = {}
    variables: Dict[str, Quantity] = {}
    for member in type_spec.members:
        if member.kind is not MemberKind.QUANTITATIVE:
            continue
        for index, value in enumerate(member.values, 1):
            if value.symbolic:
                name = value.magnitude.name
                if name not in variables:
                    variables[name] = Quantity(Fraction(int(rng.integers(1, 100))), value.unit)
                slots[(member.key, index)] = variables[name]
            else:
                slots[(member.key, index)] = Quantity(value.magnitude, value.unit)
    return Binding(slots, variables)


def cross_equivalence_check(
    member: Member, t1: TypeSpec, t2: TypeSpec, samples: int = 100, seed: int = 42
) -> bool:
    """Evaluate both types' versions of a member under random bindings of both types"""
    first, second = t1.members.get(member.key), t2.members.get(member.key)
    if first is None or second is None:
        raise ExploiterError(f"{member.key} is not declared by both {t1.name} and {t2.name}")
    if first.kind is MemberKind.QUANTITATIVE or first.kind is not second.kind:
        raise ExploiterError(f"{member.key} is not a verification function or method in both types")

    rng = np.random.default_rng(seed)
    for _ in range(samples):
        for source in (t1, t2):
            binding = sample_binding(source, rng)
            a = evaluate(first.expression, binding)
            b = evaluate(second.expression, binding)
            if not values_agree(a, b):
                logger.debug(f"{member.key} differs between {t1.name} and {t2.name} on {source.name}")
                return False
    return True
