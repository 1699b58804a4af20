#!/usr/bin/env python3
"""
Output Files for OODN-KE
Atomic writing of knowledge-base documents and content digests
"""

import hashlib
import logging
import os
import tempfile
from pathlib import Path
from typing import Union

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def atomic_write(path: PathLike, text: str) -> Path:
    """Write text to a temp file next to the target, then rename it into place"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)

    fd, temp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(temp_name, target)
    except Exception as e:
        logger.error(f"Error writing {target}: {e}")
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise

    logger.info(f"Wrote {target} ({len(text.encode('utf-8'))} bytes)")
    return target


def read_text(path: PathLike) -> str:
    return Path(path).read_text(encoding="utf-8")


def calculate_hash(text: str) -> str:
    """SHA256 of the UTF-8 encoding of text"""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
