import logging

from grid.helpers import report
from grid.management.base import ConfigCommand
from wiener.operations import galerkin_reference, nonperiodic_picard_solve, periodic_picard_solve
from wiener.serializers import PeriodicEvolveConfigSerializer, TriplesField

logger = logging.getLogger('wiener')

REFERENCE_TOLERANCE = 1e-5


class Command(ConfigCommand):
    help = 'Picard iteration in the Wiener algebra, on the torus or for atomic transforms'
    serializer_class = PeriodicEvolveConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--domain', choices=PeriodicEvolveConfigSerializer.DOMAINS)
        parser.add_argument('--rho', type=int)
        parser.add_argument('--T', type=float, dest='T')
        parser.add_argument('--n-times', type=int, dest='n_times')
        parser.add_argument('--conjugate', action='store_true', default=None)
        parser.add_argument('--linear', action='store_const', const=0, dest='lambda_sign')
        parser.add_argument('--reference-modes', type=int, dest='reference_modes')

    def overrides(self, options) -> dict:
        return {key: options.get(key) for key in
                ('domain', 'rho', 'T', 'n_times', 'conjugate', 'lambda_sign', 'reference_modes')}

    def run(self, config, serializer):
        u0, mu = serializer.build_data()
        solve = periodic_picard_solve if config['domain'] == 'periodic' else \
            nonperiodic_picard_solve
        traj = solve(u0, mu, rho=config['rho'], lambda_sign=config['lambda_sign'],
                     T=config['T'], n_times=config['n_times'], tol=config['tol'],
                     max_iters=config['max_iters'], conjugate=config['conjugate'],
                     order=config['order'])
        self.save_csv(config, ('t', 'l1_norm', 'support'), traj.rows())

        eps = u0.norm()
        sup_norm = traj.sup_norm()
        residual = traj.distances[-1]
        passed = 'unconverged' not in traj.flags
        if 'uncontrolled' not in traj.flags:
            passed = passed and sup_norm <= 2 * eps

        results = {}
        if config['domain'] == 'periodic' and config['reference_modes']:
            reference = galerkin_reference(u0, mu, config['rho'], config['lambda_sign'],
                                           config['T'], config['reference_modes'],
                                           config['conjugate'])
            error = (traj.final - reference).norm()
            logger.info('l1 distance to the galerkin reference: %.3e', error)
            results['reference_error'] = error
            passed = passed and error < REFERENCE_TOLERANCE

        return report(self.command_name, config,
                      q=traj.q,
                      eps=eps,
                      sup_norm=sup_norm,
                      iterations=traj.iterations,
                      distances=traj.distances,
                      ratios=traj.ratios,
                      sup_norm_history=traj.sup_norm_history,
                      residual=residual,
                      pruned=traj.pruned,
                      final=TriplesField.dump(traj.final),
                      flags=traj.flags,
                      passed=passed,
                      **results)
