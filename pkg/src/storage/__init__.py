#!/usr/bin/env python3
"""Knowledge-base documents, compressed storage and exports for OODN-KE"""

from .kb_document import FORMAT_VERSION, KBDocument, load_kb, save_kb
from .codec import CompressedKB, compress, restore
from .dot import export_dot
from .fixtures import builtin_quadrangle, synthetic_basics
from .stats import reference_notes, storage_stats

__all__ = [
    'FORMAT_VERSION',
    'KBDocument',
    'load_kb',
    'save_kb',
    'CompressedKB',
    'compress',
    'restore',
    'export_dot',
    'builtin_quadrangle',
    'synthetic_basics',
    'reference_notes',
    'storage_stats',
]
