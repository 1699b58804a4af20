#!/usr/bin/env python3
"""
Compressed Storage for OODN-KE
Stores one top union class in place of the basic classes and restores them from it
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

from ..core.errors import DanglingReferenceError, DuplicateTypeError, ModelError, SchemaError
from ..core.exploiters import UNION_SUFFIX, assemble_class
from ..core.model import ClassSpec, Member, MemberKind, MemberSet, Provenance, ProvenanceKind, TypeSpec
from .schema import decode_member, decode_members, encode_member, encode_members, require

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompressedProjection:
    """Quantitative members stored inline, everything else as indices into the shared table"""

    name: str
    properties: MemberSet
    shared: Tuple[int, ...]


@dataclass(frozen=True)
class CompressedKB:
    name: str
    basics: Tuple[str, ...]
    core: MemberSet
    projections: Tuple[CompressedProjection, ...]
    shared: Tuple[Member, ...]

    def _referenced(self) -> List[Member]:
        return [self.shared[i] for p in self.projections for i in p.shared if 0 <= i < len(self.shared)]

    @property
    def property_count(self) -> int:
        """Per-slot: core properties plus every property each projection stores or references"""
        referenced = [m for m in self._referenced() if m.is_property]
        return len(self.core.properties) + sum(len(p.properties) for p in self.projections) + len(referenced)

    @property
    def method_count(self) -> int:
        return len(self.core.methods) + sum(1 for m in self._referenced() if not m.is_property)

    @property
    def deduplicated_method_count(self) -> int:
        return len(self.core.methods) + sum(1 for m in self.shared if not m.is_property)


def compress(basics: Sequence[ClassSpec]) -> CompressedKB:
    """Union of all basics without absorption, with shared bodies deduplicated"""
    basics = list(basics)
    if not basics:
        raise ModelError("Nothing to compress")
    for c in basics:
        if not c.is_homogeneous:
            raise ModelError(f"Only homogeneous classes can be compressed, {c.name} is not")
    names = [c.name for c in basics]
    if len(set(names)) != len(names):
        raise DuplicateTypeError(f"Basic class names are not distinct: {names}")

    if len(basics) == 1:
        only = basics[0]
        return CompressedKB(only.name, (only.name,), only.core, (), ())

    name = "".join(names) + UNION_SUFFIX
    top = assemble_class(name, [c.types[0] for c in basics], Provenance(ProvenanceKind.UNION, tuple(names)))

    shared: List[Member] = []
    positions: Dict[tuple, int] = {}
    projections = []
    for projection in top.projections:
        inline = []
        indices = []
        for member in projection.members:
            if member.kind is MemberKind.QUANTITATIVE:
                inline.append(member)
                continue
            if member.fingerprint not in positions:
                positions[member.fingerprint] = len(shared)
                shared.append(member)
            indices.append(positions[member.fingerprint])
        projections.append(CompressedProjection(projection.name, MemberSet(inline), tuple(indices)))

    compressed = CompressedKB(name, tuple(names), top.core, tuple(projections), tuple(shared))
    logger.info(
        f"Compressed {len(basics)} classes into {name}: {compressed.property_count} properties, "
        f"{compressed.deduplicated_method_count} distinct methods"
    )
    return compressed


def restore(compressed: CompressedKB) -> List[ClassSpec]:
    """Rebuild every basic class: core plus its projection, shared bodies re-expanded"""
    if not compressed.projections:
        return [ClassSpec.homogeneous(TypeSpec(compressed.name, compressed.core))]

    restored = []
    for projection in compressed.projections:
        members = list(projection.properties)
        for index in projection.shared:
            if not 0 <= index < len(compressed.shared):
                raise DanglingReferenceError(
                    f"Projection {projection.name} refers to shared entry {index}, "
                    f"table has {len(compressed.shared)}"
                )
            members.append(compressed.shared[index])
        type_spec = TypeSpec(projection.name, compressed.core.merged(MemberSet(members)))
        restored.append(ClassSpec.homogeneous(type_spec))

    order = {name: i for i, name in enumerate(compressed.basics)}
    return sorted(restored, key=lambda c: order.get(c.name, len(order)))


def encode_compressed(compressed: CompressedKB) -> Dict[str, Any]:
    return {
        "name": compressed.name,
        "basics": list(compressed.basics),
        "core": encode_members(compressed.core),
        "projections": [
            {
                "name": p.name,
                "members": encode_members(p.properties, p.name),
                "shared": list(p.shared),
            }
            for p in compressed.projections
        ],
        "shared": [encode_member(m) for m in compressed.shared],
    }


def decode_compressed(data: Any, path: str = "compressed") -> CompressedKB:
    basics = require(data, "basics", path, list)
    shared = tuple(decode_member(m, f"{path}.shared[{i}]") for i, m in enumerate(require(data, "shared", path, list)))
    projections = []
    for i, raw in enumerate(require(data, "projections", path, list)):
        projection_path = f"{path}.projections[{i}]"
        name = require(raw, "name", projection_path)
        indices = require(raw, "shared", projection_path, list)
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in indices):
            raise SchemaError("shared indices must be integers", projection_path)
        members = decode_members(require(raw, "members", projection_path, list), f"{projection_path}.members", name)
        projections.append(CompressedProjection(name, members, tuple(indices)))
    core = decode_members(require(data, "core", path, list), f"{path}.core")
    return CompressedKB(require(data, "name", path), tuple(basics), core, tuple(projections), shared)
