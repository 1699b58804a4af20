"""Closure, order, bounds, laws, relations and classification"""

from itertools import combinations

import networkx as nx
import pytest

from src.core.errors import LatticeError, LimitExceededError, NonUniqueBoundError, UnknownNodeError
from src.core.exploiters import intersection, union
from src.core.lattice import (
    LatticeMode,
    classify_object,
    close_under_exploiters,
    count_report,
    enumerate_relations,
    glb,
    hasse,
    lub,
    predict_counts,
    predict_types,
    transliterate,
    types_described,
    verify_laws,
)
from src.storage.fixtures import quadrangle_objects, square, synthetic_basics

STRICT_INTERSECTIONS = {"SRb∩", "SRt∩", "PRt∩", "SRbPRt∩"}


# Closure


def test_named_closure_keeps_every_generated_class(named_lattice):
    assert len(named_lattice) == 26
    assert len(named_lattice.generated) == 22
    unions = [n for n in named_lattice.nodes if n.endswith("∪")]
    intersections = [n for n in named_lattice.nodes if n.endswith("∩")]
    assert len(unions) == 11
    assert len(intersections) == 11


def test_strict_closure_merges_coinciding_intersections(strict_lattice):
    intersections = {n for n in strict_lattice.nodes if n.endswith("∩")}
    assert intersections == STRICT_INTERSECTIONS
    assert len([n for n in strict_lattice.nodes if n.endswith("∪")]) == 11
    assert len(strict_lattice) == 19


def test_alias_groups(named_lattice, strict_lattice):
    for lattice in (named_lattice, strict_lattice):
        assert sum(len(group) - 1 for group in lattice.aliases) == 7
    group = named_lattice.alias_group("SP∩")
    assert group[0] == "SRbPRt∩"
    assert set(group) >= {"SP∩", "RbP∩", "SRbP∩"}


def test_count_report(named_lattice):
    report = count_report(named_lattice)
    assert (report.predicted_union, report.predicted_intersection, report.predicted_total) == (11, 11, 22)
    assert report.observed_union == 11
    assert report.observed_intersection == 4
    assert report.observed_total == 15
    assert report.alias_count == 7


def test_single_class_lattice():
    lattice = close_under_exploiters([square()])
    assert list(lattice.nodes) == ["S"]
    assert lattice.top == lattice.bottom == "S"
    assert lattice.hasse == ()
    assert lattice.subsumes("S", "S")


def test_closure_limit():
    with pytest.raises(LimitExceededError):
        close_under_exploiters(synthetic_basics(3), max_n=2)
    with pytest.raises(LimitExceededError):
        synthetic_basics(3, max_n=2)


def test_closure_needs_classes_with_distinct_names():
    with pytest.raises(LatticeError):
        close_under_exploiters([])
    with pytest.raises(LatticeError):
        close_under_exploiters([square(), square()])


# Counting


@pytest.mark.parametrize("n, per_exploiter, total", [(1, 0, 0), (2, 1, 2), (4, 11, 22), (6, 57, 114)])
def test_predict_counts(n, per_exploiter, total):
    report = predict_counts(n)
    assert report.predicted_union == report.predicted_intersection == per_exploiter
    assert report.predicted_total == total


def test_predict_counts_rejects_empty_input():
    with pytest.raises(LatticeError):
        predict_counts(0)


def test_predict_types():
    assert predict_types(4) == [
        {"k": 2, "classes": 6, "union_types": 2, "intersection_types": 1},
        {"k": 3, "classes": 4, "union_types": 3, "intersection_types": 1},
        {"k": 4, "classes": 1, "union_types": 4, "intersection_types": 1},
    ]


def _brute_force_distinct(basics, operation):
    seen = {c.fingerprint for c in basics}
    found = set()
    for k in range(2, len(basics) + 1):
        for subset in combinations(basics, k):
            fingerprint = operation(list(subset)).fingerprint
            if fingerprint not in seen:
                found.add(fingerprint)
    return len(found)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_synthetic_closure_matches_prediction(n):
    basics = synthetic_basics(n)
    lattice = close_under_exploiters(basics, LatticeMode.STRICT)
    report = count_report(lattice)
    expected = 2 ** n - n - 1
    assert report.observed_union == report.predicted_union == expected
    assert report.observed_intersection == report.predicted_intersection == expected
    assert _brute_force_distinct(basics, union) == expected
    assert _brute_force_distinct(basics, intersection) == expected
    assert len(lattice) == n + 2 * expected
    assert not lattice.aliases


def test_synthetic_types_described():
    lattice = close_under_exploiters(synthetic_basics(4))
    for row in predict_types(4):
        k = row["k"]
        unions = [node for name, node in lattice.nodes.items() if name.endswith("∪") and len(name) == 2 * k + 1]
        intersections = [
            node for name, node in lattice.nodes.items() if name.endswith("∩") and len(name) == 2 * k + 1
        ]
        assert len(unions) == len(intersections) == row["classes"]
        assert all(types_described(node) == row["union_types"] for node in unions)
        assert all(types_described(node) == row["intersection_types"] for node in intersections)


# Order and bounds


def test_basics_are_below_their_unions_and_above_their_intersections(named_lattice):
    assert named_lattice.subsumes("S", "SRb∪")
    assert named_lattice.subsumes("SRb∩", "S")
    assert not named_lattice.subsumes("S", "Rb")
    assert named_lattice.subsumes(named_lattice.bottom, named_lattice.top)


def test_extremes(named_lattice, strict_lattice):
    for lattice in (named_lattice, strict_lattice):
        assert lattice.top == "SRbPRt∪"
        assert lattice.bottom == "SRbPRt∩"
        assert not lattice.warnings


def test_resolve(named_lattice, strict_lattice):
    assert named_lattice.resolve("SRb_u") == "SRb∪"
    assert named_lattice.resolve("SP∩") == "SP∩"
    assert strict_lattice.resolve("SP∩") == "SRbPRt∩"
    assert strict_lattice.resolve("SP_n") == "SRbPRt∩"
    with pytest.raises(UnknownNodeError):
        named_lattice.resolve("Trapezoid")
    with pytest.raises(KeyError):
        named_lattice.subsumes("S", "Trapezoid")


def test_transliterate():
    assert transliterate("SRb∪") == "SRb_u"
    assert transliterate("PRt∩") == "PRt_n"


def test_lub_and_glb_of_basics(named_lattice, strict_lattice):
    assert lub(named_lattice, "S", "P") == "SP∪"
    assert glb(named_lattice, "S", "P") == "SP∩"
    assert glb(strict_lattice, "S", "P") == "SRbPRt∩"
    assert glb(named_lattice, "S", "Rb") == "SRb∩"


def test_bounds_of_comparable_nodes(named_lattice):
    assert lub(named_lattice, "S", "SRb∪") == "SRb∪"
    assert glb(named_lattice, "S", "SRb∪") == "S"


def test_non_unique_upper_bound(named_lattice):
    with pytest.raises(NonUniqueBoundError) as info:
        lub(named_lattice, "SRb∩", "P")
    assert info.value.antichain == ("SP∪", "RbP∪")


def test_covers_of_square(named_lattice):
    covers = {b for a, b in hasse(named_lattice) if a == "S"}
    assert covers == {"SRb∪", "SP∪", "SRt∪"}


def test_top_has_no_cover(named_lattice, strict_lattice):
    for lattice in (named_lattice, strict_lattice):
        assert not [edge for edge in lattice.hasse if edge[0] == lattice.top]
        assert not [edge for edge in lattice.hasse if edge[1] == lattice.bottom]


def test_hasse_closure_is_the_order(strict_lattice):
    graph = nx.DiGraph(list(hasse(strict_lattice)))
    graph.add_nodes_from(strict_lattice.nodes)
    closure = nx.transitive_closure(graph, reflexive=True)
    assert set(closure.edges()) == set(strict_lattice.order)


# Laws


def test_quadrangle_lattice_satisfies_the_laws(named_lattice):
    report = verify_laws(named_lattice, samples=200)
    assert report.passed, [r for r in report.results if not r.passed]
    assert report.law("order-union").checked == 26 * 26
    assert report.law("L5").checked == 26
    assert report.law("L1").checked == 200


def test_strict_lattice_satisfies_the_laws(strict_lattice):
    assert verify_laws(strict_lattice, samples=100).passed


def test_law_report_is_deterministic(named_lattice):
    first = verify_laws(named_lattice, samples=50, seed=3).to_dict()
    second = verify_laws(named_lattice, samples=50, seed=3).to_dict()
    assert first == second


def test_sampled_pairs_beyond_the_limit(named_lattice):
    report = verify_laws(named_lattice, samples=30, pair_limit=10)
    assert report.law("L4").checked == 30


def test_unknown_law():
    with pytest.raises(KeyError):
        verify_laws(close_under_exploiters([square()]), samples=1).law("L9")


# Relations


def test_relation_families(named_lattice):
    report = enumerate_relations(named_lattice)
    assert report.families["basics"] == 56
    assert report.families["pairs"] == 36
    assert report.families["triples"] == 8
    assert report.total_chains == 100


def test_subsumptions_are_the_strict_order(named_lattice):
    report = enumerate_relations(named_lattice)
    assert all(a != b for a, b in report.subsumptions)
    assert len(report.subsumptions) == len(named_lattice.order) - len(named_lattice)


# Classification


def test_unit_square_belongs_to_every_basic(strict_lattice):
    accepted = classify_object(strict_lattice, quadrangle_objects()[0])
    assert {"S", "Rb", "P", "Rt"} <= set(accepted)
    assert strict_lattice.top in accepted


def test_slanted_parallelogram(strict_lattice):
    accepted = set(classify_object(strict_lattice, quadrangle_objects()[1]))
    assert "P" in accepted
    assert "S" not in accepted
    assert "Rb" not in accepted
    assert "SRb∪" not in accepted
