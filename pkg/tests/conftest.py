import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.config import DEFAULT_CONFIG  # noqa: E402
from easydict import EasyDict as edict  # noqa: E402
import copy  # noqa: E402


@pytest.fixture
def default_cfg():
    """Fresh, mutable copy of the built-in configuration."""
    return edict(copy.deepcopy(DEFAULT_CONFIG))
