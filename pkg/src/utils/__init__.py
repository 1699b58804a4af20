#!/usr/bin/env python3
"""Utility modules for OODN-KE"""

from .config import Settings, load_settings
from .files import atomic_write, calculate_hash

__all__ = ['Settings', 'load_settings', 'atomic_write', 'calculate_hash']
