"""
Artifact Module

Writes result tables as CSV or JSON. Every artifact starts with the tool version and
the fully resolved configuration and contains no timestamps, so equal inputs give
byte-identical files.

Functions:
    - header_lines: '#'-prefixed header of a CSV artifact.
    - write_csv: Writes a DataFrame with its header.
    - write_json: Writes {"tool", "version", "config", "results"}.
    - write_artifact: Dispatches on the requested format.
    - read_csv: Reads a CSV artifact back into a DataFrame.
"""
import json
import logging
import math

import numpy as np
import pandas as pd

import rydberg_expansion
from rydberg_expansion.paths import ensure_parent

_logger = logging.getLogger(__name__)

TOOL = "rydberg_expansion"
FLOAT_FORMAT = "%.12g"


def _plain(value):
    """Converts numpy scalars and arrays into JSON-compatible Python values."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(item) for item in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def header_lines(config, summary=None):
    lines = [f"# {TOOL} {rydberg_expansion.__version__}"]
    for key, value in sorted(config.items()):
        lines.append(f"# {key} = {_plain(value)}")
    for key, value in sorted((summary or {}).items()):
        lines.append(f"# result.{key} = {_plain(value)}")
    return lines


def write_csv(frame, path, config, summary=None):
    """
    Writes ``frame`` to ``path`` below a '#' header describing the run.

    Args:
        frame (pd.DataFrame): Result table.
        path (str or Path): Destination; parent directories are created.
        config (dict): Resolved configuration.
        summary (dict): Scalar results echoed in the header.
    """
    path = ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as stream:
        stream.write("\n".join(header_lines(config, summary)) + "\n")
        frame.to_csv(stream, index=False, float_format=FLOAT_FORMAT,
                     lineterminator="\n")
    return path


def write_json(frame, path, config, summary=None):
    """Writes the table as a list of records next to the configuration."""
    path = ensure_parent(path)
    document = {
        "tool": TOOL,
        "version": rydberg_expansion.__version__,
        "config": _plain(config),
        "results": {"summary": _plain(summary or {}),
                    "rows": _plain(frame.to_dict(orient="records"))},
    }
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(document, stream, sort_keys=True, indent=2)
        stream.write("\n")
    return path


def write_artifact(frame, path, config, summary=None, fmt="csv"):
    writer = write_json if fmt == "json" else write_csv
    path = writer(frame, path, config, summary)
    _logger.info("Successfully saved %s rows to %s.", len(frame), path)
    return path


def read_csv(path):
    return pd.read_csv(path, comment="#")
