"""
Logging setup for the CLI and scripts.

Records go to stderr; stdout is reserved for tables. LOG_FORMAT=json switches to
one JSON object per line, which carries the `command` and `duration_s` extras
that the manager attaches to its timing record. numpy/scipy warnings
(overflow, IntegrationWarning) are routed through the `py.warnings` logger.
"""
import json
import logging
import os
import sys
from datetime import datetime, timezone

from superfrac import config

# Extra record attributes copied into JSON output when present
STRUCTURED_FIELDS = ('command', 'duration_s', 'suite')

TEXT_FORMAT = '%(asctime)s %(levelname)-7s %(name)s: %(message)s'


class JSONFormatter(logging.Formatter):
    """One JSON object per record."""

    def format(self, record):
        entry = {
            'timestamp': datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
        }
        for field in STRUCTURED_FIELDS:
            if hasattr(record, field):
                entry[field] = getattr(record, field)
        if record.exc_info and record.exc_info[0] is not None:
            entry['exception'] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


def _resolve_level(level_override):
    name = (level_override or os.getenv('LOG_LEVEL', config.LOG_LEVEL)).upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def configure_logging(level_override=None):
    """
    Install a single stderr handler on the root logger.

    level_override (DEBUG from --verbose) takes precedence over LOG_LEVEL.
    Calling it again replaces the handler.
    """
    level = _resolve_level(level_override)
    use_json = os.getenv('LOG_FORMAT', config.LOG_FORMAT).lower() == 'json'

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JSONFormatter() if use_json else logging.Formatter(TEXT_FORMAT, '%H:%M:%S'))

    root = logging.getLogger()
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(level)

    logging.captureWarnings(True)
    # mpmath and numexpr announce backends at DEBUG
    for name in ('mpmath', 'numexpr'):
        logging.getLogger(name).setLevel(max(level, logging.INFO))
