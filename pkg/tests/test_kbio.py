"""Knowledge-base documents, compressed storage, statistics and DOT export"""

import json
from dataclasses import replace

import pytest
from hypothesis import given, settings

from src.core.errors import (
    DanglingReferenceError,
    DuplicateClassError,
    DuplicateTypeError,
    KBFormatError,
    ModelError,
    SchemaError,
    UnsupportedVersionError,
)
from src.core.exploiters import union
from src.core.lattice import close_under_exploiters
from src.storage.codec import compress, restore
from src.storage.dot import export_dot
from src.storage.fixtures import PUBLISHED_FIGURES, square, synthetic_basics
from src.storage.kb_document import FORMAT_VERSION, KBDocument, document_to_dict, load_kb, save_kb
from src.storage.stats import reference_notes, storage_stats
from src.utils.files import calculate_hash
from strategies import class_lists


def same_classes(a, b):
    assert [c.name for c in a] == [c.name for c in b]
    assert [c.fingerprint for c in a] == [c.fingerprint for c in b]
    assert [c.provenance for c in a] == [c.provenance for c in b]


def reload(doc):
    return load_kb(save_kb(doc))


# Bundled knowledge base


def test_quadrangle_member_counts(quadrangle):
    assert sum(len(c.core.properties) for c in quadrangle) == PUBLISHED_FIGURES["properties"]
    assert sum(len(c.core.methods) for c in quadrangle) == PUBLISHED_FIGURES["methods"]


def test_synthetic_basics_rejects_empty_input():
    with pytest.raises(ValueError):
        synthetic_basics(0)


# Documents


def test_canonical_text(quadrangle_doc):
    text = save_kb(quadrangle_doc)
    assert text.endswith("}\n")
    data = json.loads(text)
    assert data["version"] == FORMAT_VERSION
    assert list(data) == sorted(data)
    assert "∪" not in text and "\\u" not in text


def test_round_trip_keeps_classes_and_objects(quadrangle_doc):
    loaded = reload(quadrangle_doc)
    same_classes(loaded.classes, quadrangle_doc.classes)
    assert loaded.objects == quadrangle_doc.objects
    assert loaded.get_object("unit_square").class_name == "S"


def test_saved_text_is_stable(quadrangle_doc):
    text = save_kb(quadrangle_doc)
    assert save_kb(load_kb(text)) == text


def test_origins_are_written_only_when_they_differ(quadrangle_doc):
    data = document_to_dict(quadrangle_doc)
    assert all("origin" not in m for c in data["classes"] for m in c["members"])
    inhomogeneous = document_to_dict(KBDocument([union(quadrangle_doc.classes)]))
    assert all("origin" not in m for p in inhomogeneous["classes"][0]["projections"] for m in p["members"])


def test_round_trip_of_an_inhomogeneous_class(quadrangle_doc):
    top = union(quadrangle_doc.classes)
    same_classes(reload(KBDocument([top])).classes, [top])


def test_round_trip_with_a_lattice(quadrangle_doc, named_lattice):
    doc = KBDocument(quadrangle_doc.classes, quadrangle_doc.objects, lattice=named_lattice)
    text = save_kb(doc)
    loaded = load_kb(text).lattice
    assert list(loaded.nodes) == list(named_lattice.nodes)
    assert loaded.order == named_lattice.order
    assert loaded.hasse == named_lattice.hasse
    assert loaded.aliases == named_lattice.aliases
    assert (loaded.top, loaded.bottom) == (named_lattice.top, named_lattice.bottom)
    assert loaded.resolve("SP_n") == "SP∩"
    assert save_kb(load_kb(text)) == text


def test_round_trip_with_a_strict_lattice(quadrangle_doc, strict_lattice):
    doc = KBDocument(quadrangle_doc.classes, lattice=strict_lattice)
    loaded = reload(doc).lattice
    assert loaded.resolve("SP∩") == "SRbPRt∩"
    assert loaded.subsumes("SRb∩", "S")


def test_round_trip_with_compressed_storage(quadrangle_doc):
    doc = KBDocument(compressed=compress(quadrangle_doc.classes))
    same_classes(restore(reload(doc).compressed), quadrangle_doc.classes)


@settings(max_examples=50, deadline=None)
@given(class_lists())
def test_generated_documents_round_trip(classes):
    doc = KBDocument(classes)
    text = save_kb(doc)
    same_classes(load_kb(text).classes, classes)
    assert save_kb(load_kb(text)) == text


# Document errors


def test_not_json():
    with pytest.raises(KBFormatError):
        load_kb("{")


def test_unsupported_version(quadrangle_doc):
    data = document_to_dict(quadrangle_doc)
    data["version"] = "oodn-kb/2"
    with pytest.raises(UnsupportedVersionError):
        load_kb(json.dumps(data))


def test_duplicate_class_names(quadrangle_doc):
    with pytest.raises(DuplicateClassError):
        save_kb(KBDocument([square(), square()]))
    data = document_to_dict(quadrangle_doc)
    data["classes"].append(data["classes"][0])
    with pytest.raises(DuplicateClassError):
        load_kb(json.dumps(data))


def test_missing_field_reports_its_path(quadrangle_doc):
    data = document_to_dict(quadrangle_doc)
    del data["classes"][1]["members"][0]["key"]
    with pytest.raises(SchemaError) as info:
        load_kb(json.dumps(data))
    assert info.value.path == "classes[1].members[0]"


def test_malformed_predicate_reports_its_path(quadrangle_doc):
    data = document_to_dict(quadrangle_doc)
    members = data["classes"][0]["members"]
    index = next(i for i, m in enumerate(members) if m["member_kind"] == "verification")
    members[index]["predicate"] = "(= (ref side_sizes 1)"
    with pytest.raises(SchemaError) as info:
        load_kb(json.dumps(data))
    assert info.value.path == f"classes[0].members[{index}].predicate"


def test_deeply_nested_predicate_reports_its_path(quadrangle_doc):
    data = document_to_dict(quadrangle_doc)
    data["classes"][2]["members"][0] = {
        "key": "vf_deep",
        "member_kind": "verification",
        "predicate": "(= 1 " + "(+ 1 " * 3000 + "1" + ")" * 3000 + ")",
        "asserted": 1,
    }
    with pytest.raises(SchemaError) as info:
        load_kb(json.dumps(data))
    assert info.value.path == "classes[2].members[0].predicate"


@pytest.mark.parametrize(
    "change",
    [
        lambda d: d["classes"][0].update(kind="layered"),
        lambda d: d["classes"][0]["members"][0].update(member_kind="constant"),
        lambda d: d["classes"][0]["members"][0].update(values=[{"magnitude": "1/0", "unit": "1"}]),
        lambda d: d["objects"][0]["slots"].update(side_sizes=[{"magnitude": "var:x", "unit": "cm"}]),
        lambda d: d.update(classes={}),
    ],
)
def test_schema_errors(quadrangle_doc, change):
    data = document_to_dict(quadrangle_doc)
    change(data)
    with pytest.raises(SchemaError):
        load_kb(json.dumps(data))


def test_lattice_order_naming_an_unknown_node(quadrangle_doc, named_lattice):
    data = document_to_dict(KBDocument(quadrangle_doc.classes, lattice=named_lattice))
    data["lattice"]["order"].append(["S", "Trapezoid"])
    with pytest.raises(SchemaError):
        load_kb(json.dumps(data))


@pytest.mark.parametrize(
    "change, path",
    [
        (lambda l: l.update(top="nope"), "lattice.top"),
        (lambda l: l.update(bottom="nope"), "lattice.bottom"),
        (lambda l: l["keys"][0].update(node="nope"), "lattice.keys[0].node"),
        (lambda l: l["aliases"][0].append("nope"), "lattice.aliases[0]"),
        (lambda l: l["hasse"].__setitem__(0, ["S", "nope"]), "lattice.hasse[0]"),
    ],
)
def test_lattice_names_must_be_nodes(quadrangle_doc, named_lattice, change, path):
    data = document_to_dict(KBDocument(quadrangle_doc.classes, lattice=named_lattice))
    change(data["lattice"])
    with pytest.raises(SchemaError) as info:
        load_kb(json.dumps(data))
    assert info.value.path == path


# Compressed storage


def test_compressed_quadrangle_counts(quadrangle):
    compressed = compress(quadrangle)
    assert compressed.name == "SRbPRt∪"
    assert compressed.property_count == 17
    assert compressed.method_count == 8
    assert compressed.deduplicated_method_count == 6
    assert set(compressed.core.keys()) == {"side_count", "angle_count", "vf_sum_360"}


def test_compressed_projections_store_quantitative_members_inline(quadrangle):
    compressed = compress(quadrangle)
    for projection in compressed.projections:
        assert set(projection.properties.keys()) == {"side_sizes", "angle_sizes"}


def test_restore_rebuilds_the_basics(quadrangle):
    same_classes(restore(compress(quadrangle)), quadrangle)


@settings(max_examples=50, deadline=None)
@given(class_lists())
def test_restore_inverts_compress(classes):
    same_classes(restore(compress(classes)), classes)
    doc = reload(KBDocument(compressed=compress(classes)))
    same_classes(restore(doc.compressed), classes)


def test_single_class_compresses_to_itself():
    compressed = compress([square()])
    assert compressed.projections == ()
    same_classes(restore(compressed), [square()])


def test_dangling_shared_reference(quadrangle):
    compressed = compress(quadrangle)
    broken = replace(compressed.projections[0], shared=(99,))
    with pytest.raises(DanglingReferenceError):
        restore(replace(compressed, projections=(broken,) + compressed.projections[1:]))


def test_compress_errors(quadrangle):
    with pytest.raises(ModelError):
        compress([])
    with pytest.raises(ModelError):
        compress([union(quadrangle)])
    with pytest.raises(DuplicateTypeError):
        compress([square(), square()])


# Statistics


def test_stats_of_the_plain_quadrangle(quadrangle_doc):
    stats = storage_stats(quadrangle_doc)
    text = save_kb(quadrangle_doc)
    assert stats["classes"] == 4
    assert stats["compressed"] is False
    assert (stats["properties"], stats["methods"], stats["methods_deduplicated"]) == (26, 8, 6)
    assert stats["compression_ratio"] == 1.0
    assert stats["bytes"] == len(text.encode("utf-8"))
    assert stats["sha256"] == calculate_hash(text)


def test_stats_of_the_compressed_quadrangle(quadrangle):
    stats = storage_stats(compress(quadrangle))
    assert stats["classes"] == 4
    assert stats["compressed"] is True
    assert (stats["properties"], stats["methods"], stats["methods_deduplicated"]) == (17, 8, 6)
    assert stats["compression_ratio"] == pytest.approx(23 / 34, abs=1e-4)


def test_stats_of_an_empty_knowledge_base():
    stats = storage_stats(KBDocument())
    assert stats["classes"] == stats["properties"] == stats["methods"] == stats["bytes"] == 0
    assert stats["sha256"] == ""


def test_reference_notes(quadrangle):
    notes = reference_notes(quadrangle, {"properties": 26, "compressed_methods": 6, "nodes": 26})
    assert notes == [
        "stored properties: computed 26 matches published 26",
        "compressed methods: computed 6 differs from published 5",
    ]


def test_reference_notes_only_cover_the_quadrangle():
    assert reference_notes(synthetic_basics(2), {"properties": 4}) == []


# DOT


def test_dot_structure(strict_lattice):
    text = export_dot(strict_lattice)
    lines = text.splitlines()
    assert lines[:3] == ["digraph lattice {", "  rankdir=BT;", "  node [shape=box];"]
    assert text.endswith("}\n")
    assert '  "S" -> "SRb_u";' in lines
    assert '  { rank=max; "SRbPRt_u"; }' in lines
    assert '  { rank=min; "SRbPRt_n"; }' in lines
    assert sum(1 for line in lines if "->" in line) == len(strict_lattice.hasse)
    assert "dashed" not in text


def test_dot_marks_aliases(named_lattice):
    lines = export_dot(named_lattice).splitlines()
    alias = next(line for line in lines if line.startswith('  "SP_n" [label='))
    assert "style=dashed" in alias
    representative = next(line for line in lines if line.startswith('  "SRbPRt_n" [label='))
    assert "= " in representative
    assert "dashed" not in representative


def test_dot_of_a_single_class():
    text = export_dot(close_under_exploiters([square()]))
    assert "rank=" not in text
    assert "->" not in text
