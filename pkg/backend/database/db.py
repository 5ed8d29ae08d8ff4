"""
Database helper functions for storing and retrieving model records
Uses versioned JSON files: {"format": "qnlp-<kind>", "version": 1, "payload": {...}}
"""

import json
import logging
import os
from typing import Dict

from errors import CheckpointError

logger = logging.getLogger(__name__)

RECORD_VERSION = 1
FORMAT_PREFIX = "qnlp-"


def save_record(path: str, kind: str, payload: Dict) -> str:
    """
    Save a payload as a versioned JSON record

    Args:
        path: destination file; parent directories are created
        kind: record kind, e.g. "embedding" or "seq-checkpoint"
        payload: JSON-serializable dictionary

    Returns:
        The path written
    """
    record = {
        "format": FORMAT_PREFIX + kind,
        "version": RECORD_VERSION,
        "payload": payload
    }
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(record, f, indent=2)
        f.write("\n")
    logger.info("Saved %s record to %s", kind, path)
    return path


def load_record(path: str, kind: str) -> Dict:
    """Load a record and check its format and version; returns the payload"""
    try:
        with open(path, 'r') as f:
            record = json.load(f)
    except FileNotFoundError:
        raise CheckpointError(f"{path} not found")
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"invalid JSON in {path}: {exc}")
    except OSError as exc:
        raise CheckpointError(f"cannot read {path}: {exc}")

    if not isinstance(record, dict):
        raise CheckpointError(f"{path} is not a record")
    expected = FORMAT_PREFIX + kind
    if record.get("format") != expected:
        raise CheckpointError(f"{path} holds {record.get('format')!r}, expected {expected!r}")
    if record.get("version") != RECORD_VERSION:
        raise CheckpointError(f"{path} has version {record.get('version')!r}, expected {RECORD_VERSION}")
    payload = record.get("payload")
    if not isinstance(payload, dict):
        raise CheckpointError(f"{path} has no payload")
    return payload
