import itertools
import logging

from grid.helpers import report
from grid.management.base import ConfigCommand
from grid.operations import l2_norm
from grid.serializers import InitialDataSerializer
from propagator.models import PropagatorMethod
from propagator.operations import boundary_jump, propagate
from propagator.serializers import PropagateConfigSerializer
from spectral.models import Delta
from spectral.serializers import build_interaction

logger = logging.getLogger('propagator')


class Command(ConfigCommand):
    help = 'Evolve initial data under a point interaction, check unitarity and cross-check methods'
    serializer_class = PropagateConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--delta', type=float, metavar='SIGMA')
        parser.add_argument('--method', choices=[choice for choice, _ in PropagatorMethod.choices])
        parser.add_argument('--time', type=float, action='append', dest='times')
        parser.add_argument('--compare', action='store_true', default=None)

    def overrides(self, options) -> dict:
        config = {key: options.get(key) for key in ('method', 'times', 'compare')}
        if options.get('delta') is not None:
            config['interaction'] = {'kind': 'delta', 'sigma': options['delta']}
        return config

    def run(self, config, serializer):
        pi = build_interaction(config['interaction'])
        grid = serializer.build_grid()
        f = InitialDataSerializer.build(grid, config['initial'])
        norm = l2_norm(f)

        available = PropagatorMethod.available[pi.kind]
        methods = list(available) if config['compare'] else [config.get('method') or available[0]]

        rows, norm_defects, differences, jumps = [], [], [], []
        flags = set()
        for t in config['times']:
            solutions = {}
            for method in methods:
                u = propagate(pi, f, t, method)
                flags.update(u.flags)
                solutions[method] = u
                defect = abs(l2_norm(u) - norm)
                norm_defects.append(defect)
                rows.append((t, method, l2_norm(u), u.sup_norm(), defect))
                logger.info('t=%g %s: norm defect %.2e', t, method, defect)
            if isinstance(pi, Delta):
                jumps.append(abs(boundary_jump(solutions[methods[0]], pi.sigma)))
            for first, second in itertools.combinations(methods, 2):
                difference = l2_norm(solutions[first] - solutions[second])
                differences.append({'t': t, 'methods': [first, second],
                                    'l2_difference': difference})

        self.save_csv(config, ('t', 'method', 'l2_norm', 'sup_norm', 'norm_defect'), rows)
        passed = (all(defect <= config['tolerance'] for defect in norm_defects)
                  and all(item['l2_difference'] <= config['tolerance'] for item in differences))
        return report(self.command_name, config,
                      interaction=pi.as_dict(),
                      initial_norm=norm,
                      norm_defects=norm_defects,
                      differences=differences,
                      boundary_jumps=jumps,
                      flags=flags,
                      passed=passed)
