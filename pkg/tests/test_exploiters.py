"""Union, intersection and the cross-evaluation check"""

import logging
from itertools import combinations

import pytest
from hypothesis import given, settings

from src.core.errors import DuplicateTypeError, EmptyOperandsError, ExploiterError
from src.core.expr import Unit, parse_expression
from src.core.exploiters import cross_equivalence_check, intersection, union
from src.core.model import (
    ClassSpec,
    Member,
    MemberKind,
    ProvenanceKind,
    SlotValue,
    TypeSpec,
    is_subclass,
    is_subtype,
)
from strategies import class_lists

CM = Unit.parse("cm")
CORE = {"side_count", "angle_count", "vf_sum_360", "vf_all_sides_equal", "m_perimeter"}


def homogeneous(name, *members):
    return ClassSpec.homogeneous(TypeSpec(name, list(members)))


def marker(key, value=1):
    return Member.quantitative(key, [SlotValue(value)])


# Union


def test_union_of_square_and_rhombus(join, classes):
    result = join(classes["S"], classes["Rb"])
    assert result.name == "SRb∪"
    assert set(result.core.keys()) == CORE
    assert [p.name for p in result.projections] == ["S", "Rb"]
    assert result.provenance.kind is ProvenanceKind.UNION
    assert result.provenance.constituents == ("S", "Rb")


def test_union_projections_restore_the_operands(join, classes):
    result = join(classes["S"], classes["Rb"])
    assert result.types[0].members == classes["S"].core
    assert result.types[1].members == classes["Rb"].core


def test_union_name_follows_basic_order(join, classes):
    assert join(classes["Rt"], classes["S"]).name == "SRt∪"
    assert join(classes["Rt"], classes["P"], classes["S"]).name == "SPRt∪"


def test_union_contains_its_operands(join, classes):
    result = join(classes["P"], classes["Rt"])
    assert is_subclass(classes["P"], result)
    assert is_subclass(classes["Rt"], result)


def test_union_absorbs_subtypes(join, meet, classes):
    core = meet(classes["S"], classes["Rb"])
    assert join(classes["S"], core) is classes["S"]


def test_union_is_idempotent(join, classes):
    assert join(classes["P"], classes["P"]) is classes["P"]


def test_union_of_one_class_is_that_class(classes):
    assert union([classes["S"]]) is classes["S"]


# Intersection


def test_intersection_of_square_and_rhombus(meet, classes):
    result = meet(classes["S"], classes["Rb"])
    assert result.name == "SRb∩"
    assert result.is_homogeneous
    assert set(result.core.keys()) == CORE
    assert result.provenance.kind is ProvenanceKind.INTERSECTION


def test_intersection_equals_the_union_core(join, meet, classes):
    for a, b in [("S", "Rb"), ("S", "P"), ("P", "Rt"), ("Rb", "Rt")]:
        assert meet(classes[a], classes[b]).core == join(classes[a], classes[b]).core


def test_intersection_is_below_its_operands(meet, classes):
    result = meet(classes["S"], classes["P"], classes["Rt"])
    for name in ("S", "P", "Rt"):
        assert is_subclass(result, classes[name])


def test_intersection_is_idempotent(meet, classes):
    assert meet(classes["Rt"], classes["Rt"]) is classes["Rt"]


def test_intersection_with_an_inhomogeneous_operand(join, meet, classes):
    sp = join(classes["S"], classes["P"])
    result = meet(sp, classes["Rt"])
    types = {t.fingerprint for t in result.types}
    expected = {
        meet(classes["S"], classes["Rt"]).types[0].fingerprint,
        meet(classes["P"], classes["Rt"]).types[0].fingerprint,
    }
    assert types == expected


def test_disjoint_intersection_is_empty(caplog):
    a = homogeneous("A", marker("alpha"))
    b = homogeneous("B", marker("beta"))
    with caplog.at_level(logging.WARNING):
        result = intersection([a, b])
    assert result.is_empty
    assert result.member_count == 0
    assert "Empty intersection" in caplog.text


# Errors


def test_empty_operands():
    with pytest.raises(EmptyOperandsError):
        union([])
    with pytest.raises(EmptyOperandsError):
        intersection([])


def test_one_name_with_two_contents():
    first = homogeneous("A", marker("alpha"))
    second = homogeneous("A", marker("beta"))
    with pytest.raises(DuplicateTypeError):
        union([first, second])
    with pytest.raises(DuplicateTypeError):
        intersection([first, second])


# Cross-evaluation


def test_equal_perimeter_formulas_agree(classes):
    p, rt = classes["P"].types[0], classes["Rt"].types[0]
    assert cross_equivalence_check(p.members.get("m_perimeter"), p, rt)


def test_area_formulas_of_parallelogram_and_rhombus_differ(classes):
    p, rb = classes["P"].types[0], classes["Rb"].types[0]
    assert not cross_equivalence_check(p.members.get("m_area"), p, rb)


def test_rewritten_formula_is_equivalent_but_not_equal():
    doubled = Member.method("m_perimeter", parse_expression("(* 2 (+ (ref side_sizes 1) (ref side_sizes 2)))"), CM)
    summed = Member.method(
        "m_perimeter",
        parse_expression("(+ (ref side_sizes 1) (ref side_sizes 2) (ref side_sizes 1) (ref side_sizes 2))"),
        CM,
    )
    sides = Member.quantitative("side_sizes", [SlotValue(parse_expression(f"var:s{i}"), CM) for i in (1, 2)])
    t1, t2 = TypeSpec("T1", [sides, doubled]), TypeSpec("T2", [sides, summed])
    assert doubled.fingerprint != summed.fingerprint
    assert cross_equivalence_check(doubled, t1, t2, samples=20)


def test_cross_check_rejects_properties(classes):
    s, rt = classes["S"].types[0], classes["Rt"].types[0]
    with pytest.raises(ExploiterError):
        cross_equivalence_check(s.members.get("side_count"), s, rt)


def test_cross_check_needs_the_member_in_both_types(classes):
    s, p = classes["S"].types[0], classes["P"].types[0]
    with pytest.raises(ExploiterError):
        cross_equivalence_check(s.members.get("vf_angles_90"), s, p)


def test_cross_check_is_deterministic(classes):
    s, rb = classes["S"].types[0], classes["Rb"].types[0]
    member = s.members.get("m_area")
    assert cross_equivalence_check(member, s, rb, seed=7) == cross_equivalence_check(member, s, rb, seed=7)


@pytest.mark.parametrize(
    "key, first, second, expected",
    [
        ("vf_sum_360", "S", "Rb", True),
        ("m_perimeter", "S", "Rb", True),
        ("m_perimeter", "S", "P", False),
    ],
)
def test_cross_check_on_quadrangle_members(classes, key, first, second, expected):
    t1, t2 = classes[first].types[0], classes[second].types[0]
    assert cross_equivalence_check(t1.members.get(key), t1, t2) is expected


def test_core_members_agree_under_cross_evaluation(join, classes):
    for a, b in combinations(classes, 2):
        t1, t2 = classes[a].types[0], classes[b].types[0]
        shared = [m for m in join(classes[a], classes[b]).core if m.kind is not MemberKind.QUANTITATIVE]
        assert shared
        for member in shared:
            assert cross_equivalence_check(member, t1, t2), f"{member.key} in {a}, {b}"


# Laws on generated classes


@settings(max_examples=50, deadline=None)
@given(class_lists(min_size=2, max_size=2))
def test_exploiters_commute(pair):
    a, b = pair
    assert union([a, b]).fingerprint == union([b, a]).fingerprint
    assert intersection([a, b]).fingerprint == intersection([b, a]).fingerprint


@settings(max_examples=50, deadline=None)
@given(class_lists(min_size=3, max_size=3))
def test_exploiters_associate(triple):
    a, b, c = triple
    assert union([union([a, b]), c]).fingerprint == union([a, union([b, c])]).fingerprint
    assert intersection([intersection([a, b]), c]).fingerprint == intersection([a, intersection([b, c])]).fingerprint


@settings(max_examples=50, deadline=None)
@given(class_lists(min_size=2, max_size=2))
def test_exploiters_absorb(pair):
    a, b = pair
    assert union([a, intersection([a, b])]).fingerprint == a.fingerprint
    assert intersection([a, union([a, b])]).fingerprint == a.fingerprint


@settings(max_examples=50, deadline=None)
@given(class_lists(min_size=1, max_size=4))
def test_union_core_is_in_every_type(operands):
    result = union(operands)
    for t in result.types:
        assert is_subtype(TypeSpec("core", result.core), t)
    for operand in operands:
        assert is_subclass(operand, result)
