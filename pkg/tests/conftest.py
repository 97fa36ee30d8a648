"""Test session setup: make the package importable from a source checkout."""

import sys
from pathlib import Path

_SRC = Path(__file__).resolve().parent.parent / "src"
if str(_SRC) not in sys.path:
    try:
        import choicestats  # noqa: F401
    except ImportError:
        sys.path.insert(0, str(_SRC))
