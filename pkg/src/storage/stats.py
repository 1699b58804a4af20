#!/usr/bin/env python3
"""
Storage Statistics for OODN-KE
Member counts, serialized size, compression ratio and digest of a knowledge base
"""

import logging
from typing import Dict, List, Mapping, Sequence, Union

from ..core.model import ClassSpec
from ..utils.files import calculate_hash
from .codec import CompressedKB, restore
from .fixtures import PUBLISHED_FIGURES, is_quadrangle
from .kb_document import KBDocument, save_kb

logger = logging.getLogger(__name__)

_LABELS = {
    "generated_classes": "generated classes",
    "relations_total": "relations",
    "relations_basics": "relations from basic classes",
    "relations_pairs": "relations from pair classes",
    "relations_triples": "relations from triple classes",
    "properties": "stored properties",
    "methods": "stored methods",
    "compressed_properties": "compressed properties",
    "compressed_methods": "compressed methods",
}


def _class_counts(classes: Sequence[ClassSpec]) -> Dict[str, int]:
    properties = methods = 0
    distinct = set()
    for c in classes:
        member_sets = [c.core] + [p.members for p in c.projections]
        for members in member_sets:
            properties += len(members.properties)
            methods += len(members.methods)
            distinct.update(m.fingerprint for m in members.methods)
    return {"properties": properties, "methods": methods, "methods_deduplicated": len(distinct)}


def storage_stats(source: Union[KBDocument, CompressedKB]) -> Dict:
    """Per-slot property count, raw and deduplicated method counts, size, ratio and digest"""
    doc = source if isinstance(source, KBDocument) else KBDocument(compressed=source)
    compressed = doc.compressed

    if compressed is not None:
        counts = {
            "properties": compressed.property_count,
            "methods": compressed.method_count,
            "methods_deduplicated": compressed.deduplicated_method_count,
        }
        original = _class_counts(restore(compressed))
        stored = counts["properties"] + counts["methods_deduplicated"]
        total = original["properties"] + original["methods"]
    else:
        counts = _class_counts(doc.classes)
        stored = total = counts["properties"] + counts["methods"]

    empty = not doc.classes and compressed is None and not doc.objects
    text = save_kb(doc)
    stats = {
        "classes": len(doc.classes) if compressed is None else len(compressed.basics),
        "compressed": compressed is not None,
        "properties": counts["properties"],
        "methods": counts["methods"],
        "methods_deduplicated": counts["methods_deduplicated"],
        "bytes": 0 if empty else len(text.encode("utf-8")),
        "compression_ratio": round(stored / total, 4) if total else 0.0,
        "sha256": "" if empty else calculate_hash(text),
    }
    logger.debug(f"Storage statistics: {stats}")
    return stats


def reference_notes(classes: Sequence[ClassSpec], computed: Mapping[str, int]) -> List[str]:
    """Compare computed figures with the published quadrangle figures; empty for other knowledge bases"""
    if not is_quadrangle(classes):
        return []

    notes = []
    for key, value in computed.items():
        if key not in PUBLISHED_FIGURES:
            continue
        published = PUBLISHED_FIGURES[key]
        verdict = "matches" if value == published else "differs from"
        notes.append(f"{_LABELS[key]}: computed {value} {verdict} published {published}")
        if value != published:
            logger.warning(f"{_LABELS[key]}: computed {value}, published {published}")
    return notes
