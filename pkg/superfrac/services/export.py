"""
Deterministic CSV / JSON rendering for experiment output.

CSV: `# key: value` metadata lines, then a pandas table with every float at
17 significant digits. JSON: sorted keys, schema_version stamped in, non-finite
numbers written as null. Same inputs give byte-identical text.
"""
import json
import logging
import math
import os
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from superfrac.config import CSV_FLOAT_FORMAT, SCHEMA_VERSION

logger = logging.getLogger('services.export')


def sanitize(value: Any) -> Any:
    """Convert numpy scalars/arrays to plain Python and non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(v) for v in value]
    if isinstance(value, np.ndarray):
        return [sanitize(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render_csv(frame: pd.DataFrame, metadata: Optional[Dict[str, Any]] = None) -> str:
    lines = []
    for key in sorted(metadata or {}):
        lines.append(f"# {key}: {_format_meta(metadata[key])}")
    body = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    return '\n'.join(lines + [body]) if lines else body


def _format_meta(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ','.join(_format_meta(v) for v in value)
    if isinstance(value, float):
        return CSV_FLOAT_FORMAT % value
    return str(value)


def render_json(payload: Dict[str, Any]) -> str:
    document = {'schema_version': SCHEMA_VERSION, **sanitize(payload)}
    return json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + '\n'


def write_text(text: str, path: Optional[str], stream) -> None:
    """Write to path when given, else to the stream (stdout)."""
    if path:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', newline='') as f:
            f.write(text)
        logger.info("Wrote %s (%s bytes)", path, len(text))
    else:
        stream.write(text)


def sidecar_path(path: str, suffix: str = '.json') -> str:
    """summary.json next to data.csv: data.csv -> data.json."""
    root, _ = os.path.splitext(path)
    return root + suffix
