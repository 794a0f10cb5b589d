"""
Shared pytest fixtures for quadstat.
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.config import Config  # noqa: E402
from src.statmodel import assemble_pgen, preset  # noqa: E402


@pytest.fixture
def config():
    """Default configuration, independent of the environment."""
    return Config()


@pytest.fixture(scope="session")
def presets_dir():
    return ROOT / "presets"


@pytest.fixture(scope="session")
def preset_pair():
    """(model, relation set) for a preset, assembled once per session."""
    cache = {}

    def build(name, d=None):
        key = (name, d)
        if key not in cache:
            model = preset(name, d)
            cache[key] = (model, assemble_pgen(model))
        return cache[key]

    return build
