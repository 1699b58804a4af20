#!/usr/bin/env python3
"""Core OODN-KE modules"""

from .errors import OODNError
from .expr import evaluate, expressions_equal, normalize, parse_expression, render
from .model import ClassSpec, Member, MemberSet, ObjectInstance, TypeSpec, extract_type, is_subclass, is_subtype
from .exploiters import cross_equivalence_check, intersection, union
from .lattice import KnowledgeLattice, LatticeMode, close_under_exploiters, glb, lub, verify_laws

__all__ = [
    'OODNError',
    'parse_expression',
    'normalize',
    'render',
    'evaluate',
    'expressions_equal',
    'ClassSpec',
    'Member',
    'MemberSet',
    'ObjectInstance',
    'TypeSpec',
    'extract_type',
    'is_subtype',
    'is_subclass',
    'union',
    'intersection',
    'cross_equivalence_check',
    'KnowledgeLattice',
    'LatticeMode',
    'close_under_exploiters',
    'lub',
    'glb',
    'verify_laws',
]
