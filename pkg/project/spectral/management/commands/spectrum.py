import logging

import numpy as np

from grid.helpers import report
from grid.management.base import ConfigCommand
from spectral.models import TwoDelta
from spectral.operations import (RESIDUAL_TOLERANCE, bound_state_norm, bound_states,
                                 eigenvalue_count_sweep, two_delta_residual)
from spectral.serializers import SpectrumConfigSerializer, build_interaction

logger = logging.getLogger('spectral')

NORM_TOLERANCE = 1e-6


class Command(ConfigCommand):
    help = 'Bound states of a point interaction with residual and norm checks'
    serializer_class = SpectrumConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        group = parser.add_mutually_exclusive_group()
        group.add_argument('--delta', type=float, metavar='SIGMA')
        group.add_argument('--delta-prime', type=float, metavar='BETA')
        group.add_argument('--two-delta', type=float, metavar='ALPHA')
        parser.add_argument('--a', type=float, help='half distance of the two-delta centres')

    def overrides(self, options) -> dict:
        if options.get('delta') is not None:
            return {'interaction': {'kind': 'delta', 'sigma': options['delta']}}
        if options.get('delta_prime') is not None:
            return {'interaction': {'kind': 'delta_prime', 'beta': options['delta_prime']}}
        if options.get('two_delta') is not None:
            return {'interaction': {'kind': 'two_delta', 'alpha': options['two_delta'],
                                    'a': options.get('a')}}
        return {}

    def run(self, config, serializer):
        pi = build_interaction(config['interaction'])
        states = bound_states(pi)

        eigenvalues, residuals, norms = [], [], []
        for state in states:
            eigenvalues.append(state.gamma)
            if isinstance(pi, TwoDelta):
                residuals.append(two_delta_residual(state.gamma, pi.alpha, pi.a))
            else:
                residuals.append(0.0)
            norms.append(bound_state_norm(state, pi))
            logger.info('level %d: gamma = %.15g', state.label, state.gamma)

        passed = (all(residual <= RESIDUAL_TOLERANCE for residual in residuals)
                  and all(abs(norm - 1.0) <= NORM_TOLERANCE for norm in norms))
        result = report(self.command_name, config,
                        interaction=pi.as_dict(),
                        eigenvalues=eigenvalues,
                        labels=[state.label for state in states],
                        residuals=residuals,
                        norms=norms,
                        passed=passed)

        sweep = config.get('sweep')
        if sweep:
            a_values = np.linspace(sweep['a_min'], sweep['a_max'], sweep['points'])
            counts = eigenvalue_count_sweep(pi.alpha, a_values)
            self.save_csv(config, ('a', 'count'), zip(a_values, counts))
            result['sweep'] = {'a': a_values, 'count': counts,
                               'transition': -1.0 / pi.alpha if pi.alpha < 0 else None}
        return result
