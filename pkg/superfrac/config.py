"""
Centralized configuration: env vars, precision guards, output constants.
"""
import os


# ── Logging ──────────────────────────────────────────────────────────────────
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_FORMAT = os.getenv('LOG_FORMAT', 'text')

# ── Extended precision (shifted-power substrate) ─────────────────────────────
# Digits carried by the mpmath context behind PowerBasisPoly. The basis change
# Jacobi -> (1+x)^k grows like the central Delannoy numbers, ~5.8^n.
EXTENDED_DPS = int(os.getenv('SUPERFRAC_DPS', '50'))
MAX_POWER_DEGREE = int(os.getenv('SUPERFRAC_MAX_POWER_DEGREE', '25'))

# ── Settings file ────────────────────────────────────────────────────────────
# Optional override for pipeline/experiment_config.yaml
SETTINGS_PATH = os.getenv('SUPERFRAC_SETTINGS_PATH')

# ── Output ───────────────────────────────────────────────────────────────────
SCHEMA_VERSION = '1.0'
CSV_FLOAT_FORMAT = '%.17g'

# ── Exit codes ───────────────────────────────────────────────────────────────
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_VALIDATION_FAILURE = 3
EXIT_NUMERICAL_ERROR = 4

# ── CLI command definitions ──────────────────────────────────────────────────
COMMANDS = [
    'points',
    'interp-error',
    'pg-solve',
    'quad',
    'validate',
]
