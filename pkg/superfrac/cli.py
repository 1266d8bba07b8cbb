"""
Command-line front end.

  python -m superfrac points --family legendre-gauss --n 12 --mu 0.1,0.5,0.9
  python -m superfrac points --scheme pg-frac --n 9
  python -m superfrac interp-error --family legendre-lobatto --rhs builtin:ex31 --out data/fig32.csv
  python -m superfrac pg-solve --rhs builtin:ex42 --scheme pg-frac --n 18 --s 0.1,0.5,0.9
  python -m superfrac quad --n 8 --alpha -0.5 --beta 0
  python -m superfrac validate
  python -m superfrac --list

Tables go to stdout (or --out), logs to stderr. Exit codes: 0 success,
2 configuration or domain error, 3 validation failure.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from superfrac import __version__
from superfrac.config import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_ERROR, EXIT_OK, EXIT_VALIDATION_FAILURE
from superfrac.exceptions import ConfigError, DomainError, SuperfracError, ValidationFailure
from superfrac.logging_config import configure_logging
from superfrac.pipeline.base import FORMATS, KINDS, PG_SCHEMES, SIDES, ExperimentConfig
from superfrac.pipeline.manager import describe_commands, execute
from superfrac.services.orthopoly import NodeFamily

logger = logging.getLogger('superfrac.cli')


def parse_orders(text: Optional[str]) -> List[float]:
    """'0.1,0.5,0.9' -> [0.1, 0.5, 0.9]."""
    if not text:
        return []
    orders = []
    for chunk in text.split(','):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            orders.append(float(chunk))
        except ValueError:
            raise ConfigError(f"Bad order '{chunk}' in '{text}'")
    return orders


def _config_from_args(command: str, args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        command=command,
        family=getattr(args, 'family', None),
        scheme=getattr(args, 'scheme', None),
        n=args.n,
        orders=parse_orders(getattr(args, 'orders', None)),
        kind=getattr(args, 'kind', 'rl'),
        side=getattr(args, 'side', None),
        function_id=getattr(args, 'rhs', None),
        grid_size=getattr(args, 'grid', None),
        ref_n=getattr(args, 'ref_n', 41),
        output_format=args.format,
        out=args.out,
        alpha=getattr(args, 'alpha', 0.0),
        beta=getattr(args, 'beta', 0.0),
    )


# ── Commands ─────────────────────────────────────────────────────────────────

def cmd_points(args: argparse.Namespace) -> None:
    execute(_config_from_args('points', args))


def cmd_interp_error(args: argparse.Namespace) -> None:
    execute(_config_from_args('interp-error', args))


def cmd_pg_solve(args: argparse.Namespace) -> None:
    execute(_config_from_args('pg-solve', args))


def cmd_quad(args: argparse.Namespace) -> None:
    execute(_config_from_args('quad', args))


def cmd_validate(args: argparse.Namespace) -> None:
    execute(_config_from_args('validate', args))


# ── Parser ───────────────────────────────────────────────────────────────────

def _output_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument('--n', type=int, default=None, help='Polynomial degree N')
    p.add_argument('--out', type=str, default=None, help='Write the table here instead of stdout')
    p.add_argument('--format', choices=FORMATS, default='csv')
    p.add_argument('--verbose', '-v', action='store_true', help='DEBUG logging')
    return p


def _order_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument('--mu', '--s', dest='orders', type=str, default=None,
                   help='Comma-separated fractional orders in (0, 1)')
    p.add_argument('--side', choices=SIDES, default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    families = [f.value for f in NodeFamily]
    output = _output_options()
    orders = _order_options()

    p = argparse.ArgumentParser(prog='superfrac', description='Spectral fractional calculus experiments')
    p.add_argument('--list', action='store_true', help='Describe the commands and their defaults')
    p.add_argument('--version', action='version', version=f"superfrac {__version__}")
    sub = p.add_subparsers(dest='command')

    pp = sub.add_parser('points', parents=[output, orders], help='Superconvergence point sets')
    pp.add_argument('--family', choices=families, default=None)
    pp.add_argument('--scheme', choices=PG_SCHEMES, default=None)
    pp.add_argument('--kind', choices=KINDS, default='rl')
    pp.set_defaults(func=cmd_points)

    pi = sub.add_parser('interp-error', parents=[output, orders], help='Interpolation error curves')
    pi.add_argument('--family', choices=families, default=None)
    pi.add_argument('--kind', choices=KINDS, default='rl')
    pi.add_argument('--rhs', type=str, default=None, help='builtin:ex31, legendre:<m> or a power sum')
    pi.add_argument('--grid', type=int, default=None)
    pi.set_defaults(func=cmd_interp_error)

    pg = sub.add_parser('pg-solve', parents=[output, orders], help='Petrov-Galerkin error curves')
    pg.add_argument('--scheme', choices=PG_SCHEMES, default=None, help='Restrict to one curve')
    pg.add_argument('--rhs', type=str, default=None, help='builtin:ex41|ex42|ex43|remark45, legendre:<m>, ...')
    pg.add_argument('--grid', type=int, default=None)
    pg.add_argument('--ref-n', dest='ref_n', type=int, default=41)
    pg.set_defaults(func=cmd_pg_solve)

    pq = sub.add_parser('quad', parents=[output], help='Gauss-Jacobi nodes and weights')
    pq.add_argument('--alpha', type=float, default=0.0)
    pq.add_argument('--beta', type=float, default=0.0)
    pq.set_defaults(func=cmd_quad)

    pv = sub.add_parser('validate', parents=[output], help='Numerical self-checks')
    pv.set_defaults(func=cmd_validate)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.list:
        sys.stdout.write(json.dumps(describe_commands(), indent=2, sort_keys=True) + '\n')
        return EXIT_OK
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG_ERROR

    configure_logging('DEBUG' if args.verbose else None)
    try:
        args.func(args)
    except (ConfigError, DomainError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG_ERROR
    except ValidationFailure as e:
        logger.error("%s", e)
        return EXIT_VALIDATION_FAILURE
    except SuperfracError as e:
        logger.error("%s failed: %s", args.command, e, extra={'command': args.command})
        return EXIT_NUMERICAL_ERROR
    return EXIT_OK
