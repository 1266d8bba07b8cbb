"""
Experiment Manager: command dispatch through the adapter registry.

  validate config → look up adapter → run → render (CSV or JSON) → write

The CLI and scripts/reproduce_figures.py both go through run_experiment();
only the CLI turns the exceptions raised here into exit codes.
"""
import logging
import sys
import time
from typing import Dict, Optional, Type

from superfrac import __version__
from superfrac.exceptions import ValidationFailure
from superfrac.pipeline.base import (
    ExperimentAdapter,
    ExperimentConfig,
    ExperimentResult,
    describe_registry,
    get_adapter,
)
from superfrac.pipeline.interp import InterpErrorExperiment
from superfrac.pipeline.pgsolver import PgSolveExperiment
from superfrac.pipeline.quad import QuadExperiment
from superfrac.pipeline.superpoints import PointsExperiment
from superfrac.pipeline.validation import ValidateExperiment
from superfrac.services.export import render_csv, render_json, sidecar_path, write_text

logger = logging.getLogger('pipeline.manager')


# ── Experiment registry ──────────────────────────────────────────────────────
# Maps command name → adapter class

EXPERIMENT_REGISTRY: Dict[str, Type[ExperimentAdapter]] = {
    'points':       PointsExperiment,
    'interp-error': InterpErrorExperiment,
    'pg-solve':     PgSolveExperiment,
    'quad':         QuadExperiment,
    'validate':     ValidateExperiment,
}


# ── Public API ───────────────────────────────────────────────────────────────

def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Validate the config, run the command's adapter and log its timing."""
    config.validate()
    adapter = get_adapter(EXPERIMENT_REGISTRY, config.command)
    start = time.monotonic()
    logger.info("Command '%s' via %s", config.command, adapter.__class__.__name__)
    result = adapter.run(config)
    duration = round(time.monotonic() - start, 2)
    logger.info(
        "Command '%s' finished in %.2fs (%d rows)", config.command, duration, len(result.table),
        extra={'command': config.command, 'duration_s': duration},
    )
    return result


def render_result(config: ExperimentConfig, result: ExperimentResult) -> Dict[str, str]:
    """
    Rendered documents keyed by destination.

    csv:  the table (with `# key: value` metadata) to --out or stdout, plus
          the summary as a JSON sidecar when --out is given
    json: one document holding meta, summary and the table as columns
    """
    meta = {'version': __version__, **result.meta}
    if config.output_format == 'json':
        payload = {
            'meta': meta,
            'summary': result.summary,
            'table': {column: result.table[column].tolist() for column in result.table.columns},
        }
        return {config.out or '-': render_json(payload)}

    documents = {config.out or '-': render_csv(result.table, meta)}
    if config.out:
        documents[sidecar_path(config.out)] = render_json({'meta': meta, 'summary': result.summary})
    return documents


def execute(config: ExperimentConfig, stream=None) -> ExperimentResult:
    """
    Run, write every rendered document, then raise ValidationFailure if the
    command reported failed suites. Output is written before raising.
    """
    stream = stream or sys.stdout
    result = run_experiment(config)
    for destination, text in render_result(config, result).items():
        write_text(text, None if destination == '-' else destination, stream)
    if result.failed:
        raise ValidationFailure(result.failed)
    return result


def describe_commands(registry: Optional[Dict[str, Type[ExperimentAdapter]]] = None) -> Dict[str, dict]:
    return describe_registry(registry or EXPERIMENT_REGISTRY)
