#!/usr/bin/env python3
"""
Settings for OODN-KE
Defaults, then ~/.config/oodn/config.json (or an explicit file), then environment
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, Mapping, Optional

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = Path.home() / ".config" / "oodn" / "config.json"

_CHOICES = {"mode": ("named", "strict"), "output_format": ("table", "json")}
_ENVIRONMENT = {"OODN_MAX_N": "max_n", "OODN_SEED": "seed"}


@dataclass
class Settings:
    max_n: int = 12
    seed: int = 42
    samples: int = 1000
    # verify_laws checks every pair while nodes² stays under this
    pair_limit: int = 10000
    mode: str = "named"
    output_format: str = "table"

    def to_dict(self) -> Dict:
        return asdict(self)


def _apply_file(settings: Settings, config_file: Path):
    """Merge known keys from a JSON file; bad files keep the defaults"""
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError("top level must be an object")
    except Exception as e:
        logger.error(f"Error loading config {config_file}: {e}")
        return

    types = {f.name: f.type for f in fields(Settings)}
    for key, value in data.items():
        if key not in types:
            logger.warning(f"Ignoring unknown config key: {key}")
            continue
        if key in _CHOICES:
            if value not in _CHOICES[key]:
                logger.error(f"Invalid {key} in {config_file}: {value!r}")
                continue
        elif isinstance(value, bool) or not isinstance(value, int) or value < 1:
            logger.error(f"Invalid {key} in {config_file}: {value!r}")
            continue
        setattr(settings, key, value)
    logger.info(f"Loaded config from {config_file}")


def load_settings(config_file: Optional[Path] = None, environ: Optional[Mapping[str, str]] = None) -> Settings:
    """Layered settings; a non-integer OODN_MAX_N or OODN_SEED raises ValueError"""
    settings = Settings()
    path = Path(config_file) if config_file else DEFAULT_CONFIG_FILE
    if path.exists():
        _apply_file(settings, path)
    elif config_file:
        logger.error(f"Config file not found: {path}")

    environ = os.environ if environ is None else environ
    for variable, key in _ENVIRONMENT.items():
        raw = environ.get(variable)
        if raw is None or raw == "":
            continue
        try:
            setattr(settings, key, int(raw))
        except ValueError:
            raise ValueError(f"{variable} must be an integer, got {raw!r}") from None
        logger.info(f"{key} = {raw} from {variable}")
    return settings
