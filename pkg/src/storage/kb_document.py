#!/usr/bin/env python3
"""
Knowledge-Base Documents for OODN-KE
Canonical oodn-kb/1 serialization of classes, objects, lattices and compressed stores
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..core.errors import DuplicateClassError, KBFormatError, LatticeError, SchemaError, UnsupportedVersionError
from ..core.lattice import KnowledgeLattice, LatticeMode
from ..core.model import ClassSpec, ObjectInstance
from .codec import CompressedKB, decode_compressed, encode_compressed
from .schema import (
    decode_class,
    decode_object,
    decode_provenance,
    encode_class,
    encode_object,
    encode_provenance,
    require,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = "oodn-kb/1"


@dataclass
class KBDocument:
    """Basic classes and objects, optionally with a closed lattice or a compressed store"""

    classes: List[ClassSpec] = field(default_factory=list)
    objects: List[ObjectInstance] = field(default_factory=list)
    lattice: Optional[KnowledgeLattice] = None
    compressed: Optional[CompressedKB] = None
    version: str = FORMAT_VERSION

    def get_object(self, name: str) -> Optional[ObjectInstance]:
        for obj in self.objects:
            if obj.name == name:
                return obj
        return None


# Lattice section


def _encode_lattice(lattice: KnowledgeLattice) -> Dict[str, Any]:
    return {
        "mode": lattice.mode.value,
        "basics": [c.name for c in lattice.basics],
        "nodes": list(lattice.nodes),
        "classes": [encode_class(c) for c in lattice.generated],
        "keys": [
            {"key": key, "node": lattice.key_nodes[key], "provenance": encode_provenance(provenance)}
            for key, provenance in lattice.keys.items()
        ],
        "order": [list(pair) for pair in lattice.order],
        "hasse": [list(edge) for edge in lattice.hasse],
        "top": lattice.top,
        "bottom": lattice.bottom,
        "aliases": [list(group) for group in lattice.aliases],
        "empty_intersections": list(lattice.empty_intersections),
        "warnings": list(lattice.warnings),
    }


def _pairs(raw: Any, path: str) -> List[tuple]:
    if not isinstance(raw, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p) for p in raw
    ):
        raise SchemaError("expected a list of name pairs", path)
    return [tuple(p) for p in raw]


def _decode_lattice(data: Any, classes: List[ClassSpec], path: str = "lattice") -> KnowledgeLattice:
    mode_name = require(data, "mode", path)
    try:
        mode = LatticeMode(mode_name)
    except ValueError:
        raise SchemaError(f"unknown mode {mode_name!r}", f"{path}.mode") from None

    pool = {c.name: c for c in classes}
    basics = []
    for name in require(data, "basics", path, list):
        if name not in pool:
            raise SchemaError(f"basic class {name!r} is not in the document", f"{path}.basics")
        basics.append(pool[name])
    for i, raw in enumerate(require(data, "classes", path, list)):
        generated = decode_class(raw, f"{path}.classes[{i}]")
        if generated.name in pool:
            raise DuplicateClassError(f"Duplicate class name: {generated.name}")
        pool[generated.name] = generated

    nodes = []
    for name in require(data, "nodes", path, list):
        if name not in pool:
            raise SchemaError(f"node {name!r} has no class", f"{path}.nodes")
        nodes.append(pool[name])
    node_names = {node.name for node in nodes}

    keys, key_nodes = {}, {}
    for i, raw in enumerate(require(data, "keys", path, list)):
        key_path = f"{path}.keys[{i}]"
        key = require(raw, "key", key_path)
        keys[key] = decode_provenance(require(raw, "provenance", key_path, dict), f"{key_path}.provenance")
        key_nodes[key] = require(raw, "node", key_path)
        if key_nodes[key] not in node_names:
            raise SchemaError(f"key {key!r} points at unknown node {key_nodes[key]!r}", f"{key_path}.node")

    aliases = require(data, "aliases", path, list)
    for i, group in enumerate(aliases):
        if not isinstance(group, list) or not all(isinstance(n, str) and (n in keys or n in node_names) for n in group):
            raise SchemaError("alias group names an unknown class", f"{path}.aliases[{i}]")
    hasse = _pairs(require(data, "hasse", path, list), f"{path}.hasse")
    for i, (a, b) in enumerate(hasse):
        if a not in node_names or b not in node_names:
            raise SchemaError(f"edge ({a}, {b}) names an unknown node", f"{path}.hasse[{i}]")
    extremes = {}
    for end in ("top", "bottom"):
        extremes[end] = require(data, end, path)
        if extremes[end] not in node_names:
            raise SchemaError(f"{end} {extremes[end]!r} is not a node", f"{path}.{end}")

    try:
        return KnowledgeLattice.from_order_pairs(
            mode,
            basics,
            nodes,
            _pairs(require(data, "order", path, list), f"{path}.order"),
            keys=keys,
            key_nodes=key_nodes,
            aliases=aliases,
            hasse=hasse,
            top=extremes["top"],
            bottom=extremes["bottom"],
            empty_intersections=data.get("empty_intersections", []),
            warnings=data.get("warnings", []),
        )
    except LatticeError as e:
        raise SchemaError(str(e), path) from e


# Documents


def document_to_dict(doc: KBDocument) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "version": doc.version,
        "classes": [encode_class(c) for c in doc.classes],
        "objects": [encode_object(o) for o in doc.objects],
    }
    if doc.lattice is not None:
        data["lattice"] = _encode_lattice(doc.lattice)
    if doc.compressed is not None:
        data["compressed"] = encode_compressed(doc.compressed)
    return data


def save_kb(doc: KBDocument) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline"""
    names = [c.name for c in doc.classes]
    if len(set(names)) != len(names):
        raise DuplicateClassError(f"Duplicate class names: {names}")
    return json.dumps(document_to_dict(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_kb(text: str) -> KBDocument:
    """Parse and validate an oodn-kb/1 document"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise KBFormatError(f"Not a JSON document: {e}") from e

    version = require(data, "version", "$")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"Unsupported document version {version!r}, expected {FORMAT_VERSION}")

    classes = []
    seen = set()
    for i, raw in enumerate(require(data, "classes", "$", list)):
        c = decode_class(raw, f"classes[{i}]")
        if c.name in seen:
            raise DuplicateClassError(f"Duplicate class name: {c.name}")
        seen.add(c.name)
        classes.append(c)

    objects = [decode_object(raw, f"objects[{i}]") for i, raw in enumerate(data.get("objects", []))]
    lattice = _decode_lattice(data["lattice"], classes) if "lattice" in data else None
    compressed = decode_compressed(data["compressed"]) if "compressed" in data else None

    logger.info(f"Loaded document with {len(classes)} classes and {len(objects)} objects")
    return KBDocument(classes, objects, lattice, compressed, version)
