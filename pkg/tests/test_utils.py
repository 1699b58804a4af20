"""Settings layering and output files"""

import json
import logging

import pytest

from src.utils.config import Settings, load_settings
from src.utils.files import atomic_write, calculate_hash, read_text


def test_defaults(tmp_path):
    settings = load_settings(tmp_path / "absent.json", environ={})
    assert settings == Settings()
    assert settings.to_dict()["max_n"] == 12


def test_config_file_overrides_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 7, "mode": "strict"}), encoding="utf-8")
    settings = load_settings(path, environ={})
    assert (settings.seed, settings.mode, settings.max_n) == (7, "strict", 12)


def test_environment_overrides_the_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"max_n": 8}), encoding="utf-8")
    assert load_settings(path, environ={"OODN_MAX_N": "5"}).max_n == 5


def test_invalid_values_keep_defaults(tmp_path, caplog):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"mode": "loose", "samples": -3, "colour": "red"}), encoding="utf-8")
    with caplog.at_level(logging.WARNING):
        settings = load_settings(path, environ={})
    assert settings == Settings()
    assert "Ignoring unknown config key: colour" in caplog.text


def test_unreadable_file_keeps_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("[1, 2", encoding="utf-8")
    assert load_settings(path, environ={}) == Settings()


def test_non_integer_environment_value():
    with pytest.raises(ValueError):
        load_settings(environ={"OODN_SEED": "forty-two"})


def test_atomic_write_replaces_the_target(tmp_path):
    target = tmp_path / "out" / "kb.json"
    atomic_write(target, "first\n")
    atomic_write(target, "second ∪\n")
    assert read_text(target) == "second ∪\n"
    assert [p.name for p in target.parent.iterdir()] == ["kb.json"]


def test_written_text_hashes_like_its_source(tmp_path):
    target = atomic_write(tmp_path / "kb.json", "{}\n")
    assert calculate_hash(read_text(target)) == calculate_hash("{}\n")
    assert calculate_hash("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
