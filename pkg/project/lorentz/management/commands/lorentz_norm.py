import logging

from grid.helpers import report
from grid.management.base import ConfigCommand
from grid.models import Grid, GridFunction
from lorentz.operations import bound_state_lorentz_norm, lorentz_norm, weak_lp_norm
from lorentz.serializers import LorentzNormConfigSerializer
from spectral.models import Delta
from spectral.operations import bound_states

logger = logging.getLogger('lorentz')

# a twice finer grid has to shrink the error at least this much
REFINEMENT_FACTOR = 0.75


class Command(ConfigCommand):
    help = 'Lorentz and weak-Lp norms of the delta bound state with the closed-form check'
    serializer_class = LorentzNormConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--sigma', type=float)
        parser.add_argument('--weak-p', type=float, dest='weak_p')
        parser.add_argument('--no-refine', action='store_false', default=None, dest='refine')

    def overrides(self, options) -> dict:
        return {key: options.get(key) for key in ('sigma', 'weak_p', 'refine')}

    def run(self, config, serializer):
        sigma = config['sigma']
        grid = serializer.build_grid()
        psi = GridFunction.from_callable(grid, bound_states(Delta(sigma))[0])

        rows, passed = [], True
        for p, q in config['pairs']:
            expected = bound_state_lorentz_norm(sigma, p, q)
            value = lorentz_norm(psi, p, q)
            error = abs(value - expected)
            row = {'p': p, 'q': q, 'norm': value, 'expected': expected, 'error': error}
            passed = passed and error <= config['tolerance']
            if config['refine']:
                fine = Grid(grid.x_min, grid.x_max, 2 * grid.n - 1)
                fine_psi = GridFunction.from_callable(fine, bound_states(Delta(sigma))[0])
                row['refined_error'] = abs(lorentz_norm(fine_psi, p, q) - expected)
                passed = passed and row['refined_error'] <= REFINEMENT_FACTOR * error
            logger.info('(%g, %g) norm %.10g, closed form %.10g', p, q, value, expected)
            rows.append(row)

        self.save_csv(config, ('p', 'q', 'norm', 'expected', 'error'),
                      ((row['p'], row['q'], row['norm'], row['expected'], row['error'])
                       for row in rows))
        return report(self.command_name, config,
                      sigma=sigma,
                      norms=rows,
                      weak_norm=weak_lp_norm(psi, config['weak_p']),
                      passed=passed)
