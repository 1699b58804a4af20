#!/usr/bin/env python3
"""
DOT Export for OODN-KE
Hasse diagram of a knowledge lattice as a Graphviz digraph
"""

import logging
from typing import List

from ..core.lattice import KnowledgeLattice, LatticeMode, hasse, transliterate

logger = logging.getLogger(__name__)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(lattice: KnowledgeLattice) -> str:
    """Covering edges point from subclass to superclass; top drawn last, bottom first"""
    lines: List[str] = ["digraph lattice {", "  rankdir=BT;", "  node [shape=box];"]

    for name in lattice.nodes:
        label_lines = [name]
        style = ""
        group = lattice.alias_group(name)
        if lattice.mode is LatticeMode.NAMED and len(group) > 1:
            label_lines.append("= " + ", ".join(alias for alias in group if alias != name))
            if group[0] != name:
                style = ", style=dashed"
        # \n inside a quoted DOT label is a line break
        label = '"' + "\\n".join(_quote(part)[1:-1] for part in label_lines) + '"'
        lines.append(f"  {_quote(transliterate(name))} [label={label}{style}];")

    if len(lattice.nodes) > 1:
        lines.append(f"  {{ rank=max; {_quote(transliterate(lattice.top))}; }}")
        lines.append(f"  {{ rank=min; {_quote(transliterate(lattice.bottom))}; }}")

    edges = hasse(lattice)
    for a, b in edges:
        lines.append(f"  {_quote(transliterate(a))} -> {_quote(transliterate(b))};")

    lines.append("}")
    logger.debug(f"DOT export: {len(lattice.nodes)} nodes, {len(edges)} edges")
    return "\n".join(lines) + "\n"
