#!/usr/bin/env python3
"""
Bundled Knowledge Bases for OODN-KE
The quadrangle classes (square, rhombus, parallelogram, rectangle), sample objects
and a synthetic generator whose closures have no coinciding classes
"""

import logging
from fractions import Fraction
from typing import Dict, List, Sequence

from ..core.expr import FreeVariable, Quantity, Unit, parse_expression
from ..core.lattice import DEFAULT_MAX_N
from ..core.errors import LimitExceededError
from ..core.model import ClassSpec, Member, ObjectInstance, SlotValue, TypeSpec
from .kb_document import KBDocument

logger = logging.getLogger(__name__)

# Figures published for the quadrangle knowledge base
PUBLISHED_FIGURES: Dict[str, int] = {
    "generated_classes": 22,
    "relations_total": 96,
    "relations_basics": 56,
    "relations_pairs": 32,
    "relations_triples": 8,
    "properties": 26,
    "methods": 8,
    "compressed_properties": 17,
    "compressed_methods": 5,
}

CM = Unit.parse("cm")
DEG = Unit.parse("deg")

SUM_360 = "(= (+ (ref angle_sizes 1) (ref angle_sizes 2) (ref angle_sizes 3) (ref angle_sizes 4)) 360)"
ALL_SIDES_EQUAL = "(= (ref side_sizes 1) (ref side_sizes 2) (ref side_sizes 3) (ref side_sizes 4))"
OPPOSITE_SIDES_EQUAL = "(and (= (ref side_sizes 1) (ref side_sizes 3)) (= (ref side_sizes 2) (ref side_sizes 4)))"
OPPOSITE_SIDES_PARALLEL = (
    "(and (= (ref angle_sizes 1) (ref angle_sizes 3)) (= (ref angle_sizes 2) (ref angle_sizes 4)))"
)
PERIMETER_EQUAL_SIDES = "(* 4 (ref side_sizes 1))"
PERIMETER_OPPOSITE_SIDES = "(* 2 (+ (ref side_sizes 1) (ref side_sizes 2)))"


def _counts() -> List[Member]:
    return [
        Member.quantitative("side_count", [SlotValue(Fraction(4), Unit.parse("sides"))]),
        Member.quantitative("angle_count", [SlotValue(Fraction(4), Unit.parse("angles"))]),
    ]


def _symbolic(key: str, owner: str, prefix: str, unit: Unit) -> Member:
    return Member.quantitative(key, [SlotValue(FreeVariable(f"{owner}.{prefix}{i}"), unit) for i in range(1, 5)])


def _right_angles() -> Member:
    return Member.quantitative("angle_sizes", [SlotValue(Fraction(90), DEG)] * 4)


def _verification(key: str, text: str) -> Member:
    return Member.verification(key, parse_expression(text))


def _method(key: str, text: str, unit: str) -> Member:
    return Member.method(key, parse_expression(text), Unit.parse(unit))


def square() -> ClassSpec:
    members = _counts() + [
        _symbolic("side_sizes", "S", "side", CM),
        _right_angles(),
        _verification("vf_sum_360", SUM_360),
        _verification("vf_all_sides_equal", ALL_SIDES_EQUAL),
        _verification(
            "vf_angles_90",
            "(= (ref angle_sizes 1) (ref angle_sizes 2) (ref angle_sizes 3) (ref angle_sizes 4) 90)",
        ),
        _method("m_perimeter", PERIMETER_EQUAL_SIDES, "cm"),
        _method("m_area", "(pow (ref side_sizes 1) 2)", "cm^2"),
    ]
    return ClassSpec.homogeneous(TypeSpec("S", members))


def rhombus() -> ClassSpec:
    members = _counts() + [
        _symbolic("side_sizes", "Rb", "side", CM),
        _symbolic("angle_sizes", "Rb", "angle", DEG),
        _verification("vf_sum_360", SUM_360),
        _verification("vf_all_sides_equal", ALL_SIDES_EQUAL),
        _method("m_perimeter", PERIMETER_EQUAL_SIDES, "cm"),
        _method("m_area", "(* (pow (ref side_sizes 1) 2) (sin (ref angle_sizes 1)))", "cm^2"),
    ]
    return ClassSpec.homogeneous(TypeSpec("Rb", members))


def parallelogram() -> ClassSpec:
    members = _counts() + [
        _symbolic("side_sizes", "P", "side", CM),
        _symbolic("angle_sizes", "P", "angle", DEG),
        _verification("vf_sum_360", SUM_360),
        _verification("vf_opp_parallel", OPPOSITE_SIDES_PARALLEL),
        _verification("vf_opp_equal", OPPOSITE_SIDES_EQUAL),
        _method("m_perimeter", PERIMETER_OPPOSITE_SIDES, "cm"),
        _method("m_area", "(* (ref side_sizes 1) (ref side_sizes 2) (sin (ref angle_sizes 1)))", "cm^2"),
    ]
    return ClassSpec.homogeneous(TypeSpec("P", members))


def rectangle() -> ClassSpec:
    members = _counts() + [
        _symbolic("side_sizes", "Rt", "side", CM),
        _right_angles(),
        _verification("vf_sum_360", SUM_360),
        _verification("vf_opp_equal", OPPOSITE_SIDES_EQUAL),
        _method("m_perimeter", PERIMETER_OPPOSITE_SIDES, "cm"),
        _method("m_area", "(* (ref side_sizes 1) (ref side_sizes 2))", "cm^2"),
    ]
    return ClassSpec.homogeneous(TypeSpec("Rt", members))


def quadrangle_classes() -> List[ClassSpec]:
    return [square(), rhombus(), parallelogram(), rectangle()]


def _sides_and_angles(sides: Sequence[int], angles: Sequence[int]) -> Dict[str, tuple]:
    return {
        "side_sizes": tuple(Quantity(Fraction(s), CM) for s in sides),
        "angle_sizes": tuple(Quantity(Fraction(a), DEG) for a in angles),
    }


def quadrangle_objects() -> List[ObjectInstance]:
    return [
        ObjectInstance("unit_square", "S", _sides_and_angles((2, 2, 2, 2), (90, 90, 90, 90))),
        ObjectInstance("slanted_parallelogram", "P", _sides_and_angles((2, 3, 2, 3), (60, 120, 60, 120))),
    ]


def builtin_quadrangle() -> KBDocument:
    """The quadrangle knowledge base: 26 properties and 8 methods over four classes"""
    return KBDocument(quadrangle_classes(), quadrangle_objects())


def is_quadrangle(classes: Sequence[ClassSpec]) -> bool:
    """True when the classes are member-for-member the bundled quadrangle"""
    reference = quadrangle_classes()
    if [c.name for c in classes] != [c.name for c in reference]:
        return False
    return all(a.fingerprint == b.fingerprint for a, b in zip(classes, reference))


def _label(index: int) -> str:
    return f"C{index + 1}"


def synthetic_basics(n: int, max_n: int = DEFAULT_MAX_N) -> List[ClassSpec]:
    """n classes sharing a 3-member core, with one marker member per non-empty subset of them"""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if n > max_n:
        raise LimitExceededError(f"{n} synthetic classes exceed the limit of {max_n}")

    core = [
        Member.quantitative("shared_count", [SlotValue(Fraction(n), Unit.parse("items"))]),
        Member.verification("vf_shared", parse_expression("(= (ref shared_count 1) (ref shared_count 1))")),
        Member.method("m_shared", parse_expression("(* 2 (ref shared_count 1))"), Unit.parse("items")),
    ]
    classes = []
    for i in range(n):
        markers = []
        for mask in range(1, 2 ** n):
            if mask & (1 << i):
                owners = "".join(_label(j) for j in range(n) if mask & (1 << j))
                markers.append(Member.quantitative(f"in_{owners}", [SlotValue(Fraction(mask), Unit.parse("marks"))]))
        classes.append(ClassSpec.homogeneous(TypeSpec(_label(i), core + markers)))
    logger.debug(f"Built {n} synthetic classes with {2 ** (n - 1) + 3} members each")
    return classes
