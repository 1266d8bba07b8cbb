"""
Experiment contracts.

Every command adapter implements ExperimentAdapter.run() and returns an
ExperimentResult. Numerical work lives in the services and in the concrete
adapters; the experiment manager only sees the uniform interface.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Type

import pandas as pd

from superfrac.config import COMMANDS
from superfrac.exceptions import ConfigError
from superfrac.services.orthopoly import NodeFamily

PG_SCHEMES = ['pg-value', 'pg-frac']
KINDS = ['rl', 'caputo']
SIDES = ['left', 'right']
FORMATS = ['csv', 'json']


@dataclass
class ExperimentConfig:
    """Everything one command run needs; built by the CLI or by scripts."""
    command: str
    family: Optional[str] = None
    scheme: Optional[str] = None
    n: Optional[int] = None
    orders: List[float] = field(default_factory=list)
    kind: str = 'rl'
    side: Optional[str] = None
    function_id: Optional[str] = None
    grid_size: Optional[int] = None
    ref_n: int = 41
    output_format: str = 'csv'
    out: Optional[str] = None
    alpha: float = 0.0
    beta: float = 0.0

    def validate(self) -> 'ExperimentConfig':
        """Raise ConfigError on anything the adapters cannot run."""
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command '{self.command}' (known: {', '.join(COMMANDS)})")
        if self.family is not None:
            try:
                NodeFamily(self.family)
            except ValueError:
                known = ', '.join(f.value for f in NodeFamily)
                raise ConfigError(f"Unknown family '{self.family}' (known: {known})")
        if self.scheme is not None and self.scheme not in PG_SCHEMES:
            raise ConfigError(f"Unknown scheme '{self.scheme}' (known: {', '.join(PG_SCHEMES)})")
        if self.family is not None and self.scheme is not None:
            raise ConfigError("Give either --family or --scheme, not both")
        if self.n is not None and self.n < 1:
            raise ConfigError(f"N must be >= 1, got {self.n}")
        for order in self.orders:
            if not 0.0 < order < 1.0:
                raise ConfigError(f"Orders must lie in (0, 1), got {order}")
        if self.kind not in KINDS:
            raise ConfigError(f"Unknown kind '{self.kind}' (known: {', '.join(KINDS)})")
        if self.side is not None and self.side not in SIDES:
            raise ConfigError(f"Unknown side '{self.side}' (known: {', '.join(SIDES)})")
        if self.output_format not in FORMATS:
            raise ConfigError(f"Unknown format '{self.output_format}' (known: {', '.join(FORMATS)})")
        if self.grid_size is not None and self.grid_size < 2:
            raise ConfigError(f"Grid size must be >= 2, got {self.grid_size}")
        if self.ref_n < 1:
            raise ConfigError(f"Reference N must be >= 1, got {self.ref_n}")
        return self


@dataclass
class ExperimentResult:
    """Uniform output from every command: a table, a summary, and metadata."""
    table: pd.DataFrame
    summary: Dict[str, Any] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)
    failed: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failed


class ExperimentAdapter(ABC):
    """
    Base class for command adapters.

    The adapter receives a validated ExperimentConfig, fills unspecified
    fields from the experiment settings, runs the computation, and returns
    an ExperimentResult.
    """
    command: str = ''

    # Metadata printed by `superfrac --list`
    description: str = ''
    defaults: Dict[str, Any] = {}

    @abstractmethod
    def run(self, config: ExperimentConfig) -> ExperimentResult:
        ...


# ── Experiment registry ──────────────────────────────────────────────────────
# The manager assembles EXPERIMENT_REGISTRY = {'points': PointsExperiment, ...}


def get_adapter(registry: Dict[str, Type[ExperimentAdapter]], command: str) -> ExperimentAdapter:
    """Look up and instantiate the adapter for a command."""
    adapter_cls = registry.get(command)
    if not adapter_cls:
        raise ConfigError(f"No adapter registered for command '{command}'")
    return adapter_cls()


def describe_registry(registry: Dict[str, Type[ExperimentAdapter]]) -> Dict[str, Any]:
    """
    Serialize the registry into a JSON-friendly dict.

    Returns: { "points": { "description": "...", "defaults": {...} }, ... }
    """
    return {
        command: {
            'description': cls.description or '',
            'defaults': dict(cls.defaults) if isinstance(cls.defaults, dict) else {},
        }
        for command, cls in registry.items()
    }
