#!/usr/bin/env python3
"""
Document Schema for OODN-KE
Conversion between model values and the plain structures of an oodn-kb/1 document
"""

import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

from ..core.errors import ExpressionError, ModelError, SchemaError
from ..core.expr import FreeVariable, Quantity, Unit, format_number, parse_expression, render
from ..core.model import (
    ClassSpec,
    Member,
    MemberKind,
    MemberSet,
    ObjectInstance,
    Projection,
    Provenance,
    ProvenanceKind,
    SlotValue,
    TypeSpec,
)

logger = logging.getLogger(__name__)


def require(data: Any, key: str, path: str, kind: Union[type, Tuple[type, ...]] = str) -> Any:
    """Fetch a field, raising SchemaError with its path when missing or mistyped"""
    if not isinstance(data, dict):
        raise SchemaError("expected an object", path)
    if key not in data:
        raise SchemaError(f"missing field {key!r}", path)
    value = data[key]
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"field {key!r} must be int", path)
    if not isinstance(value, kind):
        expected = " or ".join(k.__name__ for k in kind) if isinstance(kind, tuple) else kind.__name__
        raise SchemaError(f"field {key!r} must be {expected}", path)
    return value


def _expression(text: str, path: str, boolean: bool):
    try:
        expression = parse_expression(text)
    except ExpressionError as e:
        raise SchemaError(f"malformed expression: {e}", path) from e
    if expression.boolean != boolean:
        raise SchemaError(f"expected a {'predicate' if boolean else 'arithmetic expression'}", path)
    return expression


def _unit(text: str, path: str) -> Unit:
    try:
        return Unit.parse(text)
    except ExpressionError as e:
        raise SchemaError(str(e), path) from e


# Magnitudes


def encode_magnitude(magnitude) -> str:
    if isinstance(magnitude, FreeVariable):
        return render(magnitude)
    return format_number(magnitude)


def decode_magnitude(raw: Any, path: str):
    if isinstance(raw, int) and not isinstance(raw, bool):
        return Fraction(raw)
    if not isinstance(raw, str):
        raise SchemaError("magnitude must be a string", path)
    if raw.startswith("var:"):
        if not raw[4:]:
            raise SchemaError("free variable needs a name", path)
        return FreeVariable(raw[4:])
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"invalid magnitude {raw!r}", path) from None


def encode_quantity(quantity: Quantity) -> Dict[str, str]:
    return {"magnitude": encode_magnitude(quantity.magnitude), "unit": quantity.unit.render()}


def decode_quantity(data: Any, path: str) -> Quantity:
    magnitude = decode_magnitude(require(data, "magnitude", path, (str, int)), f"{path}.magnitude")
    if isinstance(magnitude, FreeVariable):
        raise SchemaError("object values must be concrete", path)
    return Quantity(magnitude, _unit(require(data, "unit", path), f"{path}.unit"))


# Members


def encode_member(member: Member, enclosing: Optional[str] = None) -> Dict[str, Any]:
    """Origin is written only when it differs from the enclosing type"""
    data: Dict[str, Any] = {"key": member.key, "member_kind": member.kind.value}
    if member.kind is MemberKind.QUANTITATIVE:
        data["values"] = [
            {"magnitude": encode_magnitude(v.magnitude), "unit": v.unit.render()} for v in member.values
        ]
        if member.origin is not None and member.origin != enclosing:
            data["origin"] = member.origin
    elif member.kind is MemberKind.VERIFICATION:
        data["predicate"] = render(member.predicate)
        data["asserted"] = member.asserted
    else:
        data["body"] = render(member.body)
        data["result_unit"] = member.result_unit.render()
    return data


def decode_member(data: Any, path: str, enclosing: Optional[str] = None) -> Member:
    key = require(data, "key", path)
    kind_name = require(data, "member_kind", path)
    try:
        kind = MemberKind(kind_name)
    except ValueError:
        raise SchemaError(f"unknown member_kind {kind_name!r}", path) from None

    try:
        if kind is MemberKind.QUANTITATIVE:
            values = []
            for i, raw in enumerate(require(data, "values", path, list)):
                value_path = f"{path}.values[{i}]"
                magnitude = decode_magnitude(require(raw, "magnitude", value_path, (str, int)), value_path)
                values.append(SlotValue(magnitude, _unit(require(raw, "unit", value_path), value_path)))
            origin = data.get("origin", enclosing)
            return Member.quantitative(key, values, origin=origin)
        if kind is MemberKind.VERIFICATION:
            predicate = _expression(require(data, "predicate", path), f"{path}.predicate", boolean=True)
            return Member.verification(key, predicate, require(data, "asserted", path, int))
        body = _expression(require(data, "body", path), f"{path}.body", boolean=False)
        return Member.method(key, body, _unit(data.get("result_unit", "1"), f"{path}.result_unit"))
    except ModelError as e:
        raise SchemaError(str(e), path) from e


def encode_members(members: MemberSet, enclosing: Optional[str] = None) -> List[Dict[str, Any]]:
    return [encode_member(m, enclosing) for m in members]


def decode_members(raw: Any, path: str, enclosing: Optional[str] = None) -> MemberSet:
    if not isinstance(raw, list):
        raise SchemaError("expected a list of members", path)
    try:
        return MemberSet(decode_member(m, f"{path}[{i}]", enclosing) for i, m in enumerate(raw))
    except ModelError as e:
        raise SchemaError(str(e), path) from e


# Classes


def encode_provenance(provenance: Provenance) -> Dict[str, Any]:
    return {"kind": provenance.kind.value, "constituents": list(provenance.constituents)}


def decode_provenance(data: Any, path: str) -> Provenance:
    kind_name = require(data, "kind", path)
    try:
        kind = ProvenanceKind(kind_name)
    except ValueError:
        raise SchemaError(f"unknown provenance kind {kind_name!r}", path) from None
    constituents = require(data, "constituents", path, list)
    if not constituents or not all(isinstance(c, str) for c in constituents):
        raise SchemaError("constituents must be a non-empty list of names", path)
    return Provenance(kind, tuple(constituents))


def encode_class(c: ClassSpec) -> Dict[str, Any]:
    data: Dict[str, Any] = {"name": c.name, "provenance": encode_provenance(c.provenance)}
    if c.is_homogeneous:
        data["kind"] = "homogeneous"
        data["members"] = encode_members(c.core, c.name)
    else:
        data["kind"] = "inhomogeneous"
        data["core"] = encode_members(c.core)
        data["projections"] = [
            {"name": p.name, "members": encode_members(p.members, p.name)} for p in c.projections
        ]
    return data


def decode_class(data: Any, path: str) -> ClassSpec:
    name = require(data, "name", path)
    kind = require(data, "kind", path)
    provenance = decode_provenance(data["provenance"], f"{path}.provenance") if "provenance" in data else None

    try:
        if kind == "homogeneous":
            members = decode_members(require(data, "members", path, list), f"{path}.members", name)
            return ClassSpec.homogeneous(TypeSpec(name, members), provenance)
        if kind == "inhomogeneous":
            core = decode_members(require(data, "core", path, list), f"{path}.core")
            projections = []
            for i, raw in enumerate(require(data, "projections", path, list)):
                projection_path = f"{path}.projections[{i}]"
                projection_name = require(raw, "name", projection_path)
                members = decode_members(
                    require(raw, "members", projection_path, list), f"{projection_path}.members", projection_name
                )
                projections.append(Projection(projection_name, members))
            return ClassSpec(name, core, tuple(projections), provenance)
    except ModelError as e:
        raise SchemaError(str(e), path) from e
    raise SchemaError(f"unknown class kind {kind!r}", path)


# Objects


def encode_object(obj: ObjectInstance) -> Dict[str, Any]:
    return {
        "name": obj.name,
        "class": obj.class_name,
        "slots": {key: [encode_quantity(q) for q in values] for key, values in obj.slots.items()},
        "variables": {name: encode_quantity(q) for name, q in obj.variables.items()},
    }


def decode_object(data: Any, path: str) -> ObjectInstance:
    slots = {}
    for key, values in require(data, "slots", path, dict).items():
        if not isinstance(values, list):
            raise SchemaError("slot values must be a list", f"{path}.slots.{key}")
        slots[key] = tuple(decode_quantity(v, f"{path}.slots.{key}[{i}]") for i, v in enumerate(values))
    variables = {
        name: decode_quantity(v, f"{path}.variables.{name}") for name, v in data.get("variables", {}).items()
    }
    return ObjectInstance(require(data, "name", path), require(data, "class", path), slots, variables)
