"""
Gauss-Jacobi rules as a command, with a moment check against exact
weighted moments computed in extended precision.
"""
import logging
from typing import List

import numpy as np
import pandas as pd

from superfrac.exceptions import DomainError
from superfrac.pipeline.base import ExperimentAdapter, ExperimentConfig, ExperimentResult
from superfrac.services.orthopoly import JacobiParam, QuadRule, gauss_jacobi_rule, jacobi_roots
from superfrac.services.specialfn import ext, jacobi_mass

logger = logging.getLogger('pipeline.quad')


def jacobi_moment(p: JacobiParam, j: int) -> float:
    """
    ∫ x^j (1-x)^α (1+x)^β dx over [-1, 1].

    x^j = ((1+x) - 1)^j expands into Beta integrals; the alternating sum is
    carried in extended precision.
    """
    if j < 0:
        raise DomainError(f"Moment index must be >= 0, got {j}")
    p.require_integrable()
    a = ext.mpf(p.alpha)
    b = ext.mpf(p.beta)
    total = ext.mpf(0)
    for i in range(j + 1):
        term = ext.binomial(j, i) * ext.power(2, a + b + i + 1) * ext.beta(a + 1, b + i + 1)
        total += term if (j - i) % 2 == 0 else -term
    return float(total)


def moment_errors(rule: QuadRule, max_degree: int) -> List[float]:
    """|Q(x^j) - M_j| / mass for j = 0..max_degree."""
    mass = jacobi_mass(rule.params.alpha, rule.params.beta)
    errors = []
    for j in range(max_degree + 1):
        approx = float(np.dot(rule.weights, rule.nodes ** j))
        errors.append(abs(approx - jacobi_moment(rule.params, j)) / mass)
    return errors


class QuadExperiment(ExperimentAdapter):
    command = 'quad'
    description = 'Gauss-Jacobi nodes and weights with a moment-exactness check'
    defaults = {'n': 8, 'alpha': 0.0, 'beta': 0.0}

    def run(self, config: ExperimentConfig) -> ExperimentResult:
        n = config.n if config.n is not None else self.defaults['n']
        params = JacobiParam(config.alpha, config.beta)
        rule = gauss_jacobi_rule(params, n)
        errors = moment_errors(rule, 2 * n - 1)
        newton = jacobi_roots(params, n, method='newton')
        node_gap = float(np.max(np.abs(newton - rule.nodes)))
        logger.debug("quad alpha=%s beta=%s n=%s: moment error %.2e, newton gap %.2e",
                     params.alpha, params.beta, n, max(errors), node_gap)

        table = pd.DataFrame({
            'index': np.arange(n),
            'node': rule.nodes,
            'weight': rule.weights,
        })
        summary = {
            'alpha': params.alpha,
            'beta': params.beta,
            'n': n,
            'mass': jacobi_mass(params.alpha, params.beta),
            'weight_sum': float(np.sum(rule.weights)),
            'exact_degree': 2 * n - 1,
            'max_moment_error': max(errors),
            'newton_node_gap': node_gap,
        }
        meta = {'command': self.command, 'alpha': params.alpha, 'beta': params.beta, 'n': n}
        return ExperimentResult(table=table, summary=summary, meta=meta)
