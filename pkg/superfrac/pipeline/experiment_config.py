"""
Experiment settings loader: grids, orders, thresholds, reference N.

YAML file with in-memory cache and hardcoded fallback if the file is missing.
SUPERFRAC_SETTINGS_PATH points at an alternative file.
"""
import logging
import os
from typing import Any, Dict

import yaml

from superfrac import config

logger = logging.getLogger('pipeline.settings')


_experiment_config = None


def _default_config() -> Dict[str, Any]:
    """Hardcoded fallback if YAML is missing."""
    return {
        'version': 'default',
        'interp': {
            'grid_size': 2001,
            'singular_guard': 1e-6,
            'orders': [0.1, 0.3, 0.5, 0.7, 0.9],
            'n': 12,
            'function': 'ex31',
            'min_gain_ratio': 5.0,
            'zero_floor': 1e-11,
        },
        'pg': {
            'value_n': 9,
            'deriv_n': {'ex41': 12, 'ex42': 18, 'ex43': 10, 'remark45': 9},
            'orders': [0.1, 0.3, 0.55, 0.7, 0.9],
            'ref_n': 41,
            'grid_size': 2001,
            'max_superpoint_ratio': 0.2,
            'quad_min_points': 64,
            'quad_extra_points': 16,
            'reaction_condition_limit': 1e12,
        },
        'superpoints': {
            'scan_panels': 2000,
            'near_anchor_min': 1e-12,
            'near_anchor_max': 1e-2,
            'near_anchor_samples': 200,
            'root_tol': 1e-13,
            'residual_tol': 1e-10,
        },
        'oracle': {
            'points': 128,
            'min_anchor_distance': 1e-10,
        },
        'validate': {
            'oracle_n': [4, 8, 12],
            'oracle_orders': [0.1, 0.5, 0.9],
            'oracle_samples': 50,
            'oracle_rtol': 1e-9,
            'decay_n': [5, 10, 15, 20],
            'decay_order': 0.55,
            'decay_factor': 0.1,
            'decay_floor': 1e-12,
            'continuity_order': 0.999999,
            'continuity_tol': 1e-3,
            'galerkin_tol': 1e-10,
            'quad_tol': 1e-12,
            'exactness_tol': 1e-12,
            'reproduce_tol': 1e-11,
            'superpoint_n': 12,
            'mirror_n': 8,
            'reaction_n': 12,
            'reaction_tol': 1e-10,
            'seed': 20240917,
        },
    }


def _settings_path() -> str:
    return config.SETTINGS_PATH or os.path.join(os.path.dirname(__file__), 'experiment_config.yaml')


def load_experiment_config() -> Dict[str, Any]:
    """Load settings from YAML, with in-memory cache and hardcoded fallback."""
    global _experiment_config
    if _experiment_config is not None:
        return _experiment_config

    path = _settings_path()
    try:
        with open(path, 'r') as f:
            loaded = yaml.safe_load(f)
        if not isinstance(loaded, dict):
            raise ValueError('settings file is not a mapping')
        _experiment_config = loaded
        logger.info("Settings loaded from %s (version=%s)", path, loaded.get('version', '?'))
    except Exception as e:
        logger.warning("Settings file unusable (%s), using defaults", e)
        _experiment_config = _default_config()

    return _experiment_config


def reset_cache():
    """Clear the cached settings. Used by tests."""
    global _experiment_config
    _experiment_config = None


def _section(name: str) -> Dict[str, Any]:
    defaults = _default_config()[name]
    loaded = load_experiment_config().get(name) or {}
    return {**defaults, **loaded}


def get_interp_settings() -> Dict[str, Any]:
    return _section('interp')


def get_pg_settings() -> Dict[str, Any]:
    return _section('pg')


def get_superpoint_settings() -> Dict[str, Any]:
    return _section('superpoints')


def get_oracle_settings() -> Dict[str, Any]:
    return _section('oracle')


def get_validate_settings() -> Dict[str, Any]:
    return _section('validate')


def get_deriv_n(rhs_name: str, fallback: int) -> int:
    """Degree used for derivative-error curves of a builtin rhs."""
    return int(get_pg_settings().get('deriv_n', {}).get(rhs_name, fallback))


def pg_quad_points(N: int) -> int:
    """Gauss-Legendre points for the Legendre projection of f."""
    pg = get_pg_settings()
    return max(2 * N + int(pg['quad_extra_points']), int(pg['quad_min_points']))
