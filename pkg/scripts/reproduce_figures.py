#!/usr/bin/env python3
"""
Write the data behind every published figure into one directory.

Covers:
  1. Interpolation superpoints and error curves for Gauss, Lobatto and
     left-Radau nodes (N = 12, ex31)
  2. PG value and fractional-derivative error curves for ex41, ex42, ex43
  3. The reaction problem (remark45)
  4. PG superpoint sets for the default orders

Usage:
    python scripts/reproduce_figures.py                  # into ./figures
    python scripts/reproduce_figures.py --out-dir data   # elsewhere
    python scripts/reproduce_figures.py --only pg        # one group

Each dataset is a CSV with a JSON sidecar holding the summary.
"""
import argparse
import os
import sys
from typing import Callable, Dict, List

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from superfrac.logging_config import configure_logging
from superfrac.pipeline.base import ExperimentConfig
from superfrac.pipeline.manager import execute


# ── Datasets ─────────────────────────────────────────────────────────────────

INTERP_FAMILIES = ['legendre-gauss', 'legendre-lobatto', 'legendre-radau-left']
PG_RHS = ['ex41', 'ex42', 'ex43', 'remark45']


def interp_datasets(out_dir: str) -> List[ExperimentConfig]:
    configs = []
    for family in INTERP_FAMILIES:
        configs.append(ExperimentConfig(command='points', family=family,
                                        out=os.path.join(out_dir, f"points_{family}.csv")))
        configs.append(ExperimentConfig(command='interp-error', family=family, function_id='builtin:ex31',
                                        out=os.path.join(out_dir, f"interp_{family}.csv")))
    return configs


def pg_datasets(out_dir: str) -> List[ExperimentConfig]:
    configs = [
        ExperimentConfig(command='points', scheme='pg-value', n=9, out=os.path.join(out_dir, 'points_pg_value.csv')),
        ExperimentConfig(command='points', scheme='pg-frac', n=12, out=os.path.join(out_dir, 'points_pg_frac.csv')),
    ]
    for name in PG_RHS:
        for scheme in ('pg-value', 'pg-frac'):
            configs.append(ExperimentConfig(command='pg-solve', scheme=scheme, function_id=f"builtin:{name}",
                                            out=os.path.join(out_dir, f"pg_{name}_{scheme}.csv")))
    return configs


GROUPS: Dict[str, Callable[[str], List[ExperimentConfig]]] = {
    'interp': interp_datasets,
    'pg': pg_datasets,
}


def main():
    parser = argparse.ArgumentParser(description='Write figure datasets as CSV + JSON')
    parser.add_argument('--out-dir', default='figures', help='Target directory (created if missing)')
    parser.add_argument('--only', choices=sorted(GROUPS), default=None, help='Write one group only')
    args = parser.parse_args()

    configure_logging()
    groups = [args.only] if args.only else list(GROUPS)
    written = 0
    for group in groups:
        for config in GROUPS[group](args.out_dir):
            execute(config)
            written += 1
    print(f'Wrote {written} datasets to {args.out_dir}/')


if __name__ == '__main__':
    main()
