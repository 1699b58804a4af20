#!/usr/bin/env python3
"""
OODN-KE - Knowledge Extraction for Object-Oriented Dynamic Networks
"""

__version__ = "1.0.0"
__author__ = "OODN-KE Contributors"
__description__ = "Class lattices from union and intersection exploiters, with subsumption reasoning and compressed storage"
