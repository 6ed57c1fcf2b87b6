"""Python module for finding useful paths"""

import os
from pathlib import Path

PARENT_DIR = Path(__file__).parent.resolve().parent.parent
REPORTS_DIR = PARENT_DIR / "reports"
DATA_DIR = REPORTS_DIR / "data"


def output_dir():
    """Artifact directory: RYDBERG_OUTPUT_DIR if set, else reports/data."""
    configured = os.environ.get("RYDBERG_OUTPUT_DIR", "").strip()
    return Path(configured) if configured else DATA_DIR


def ensure_parent(path):
    """Creates the directory holding ``path`` if needed and returns ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
