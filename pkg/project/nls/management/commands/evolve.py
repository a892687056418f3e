import logging
from dataclasses import replace

from grid.helpers import report
from grid.management.base import ConfigCommand
from grid.serializers import GaussianSerializer, InitialDataSerializer
from nls.operations import (asymptotic_diag, budget, contraction_budget, orbit_manifold_diag,
                            picard_residual, picard_solve, scale_to_budget, trajectory_norm,
                            weighted_profile)
from nls.serializers import ORBIT_TIMES, EvolveConfigSerializer

logger = logging.getLogger('nls')


class Command(ConfigCommand):
    help = 'Picard iteration for the weak-Lp global solution, or the periodic-orbit diagnostic'
    serializer_class = EvolveConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--diagnostic', choices=EvolveConfigSerializer.DIAGNOSTICS)
        parser.add_argument('--sigma', type=float)
        parser.add_argument('--rho', type=float)
        parser.add_argument('--eps', type=float)
        parser.add_argument('--target-budget', type=float, dest='target_budget')
        parser.add_argument('--linear', action='store_const', const=0, dest='lambda_sign')

    def overrides(self, options) -> dict:
        return {key: options.get(key)
                for key in ('diagnostic', 'sigma', 'rho', 'eps', 'target_budget', 'lambda_sign')}

    def run(self, config, serializer):
        u0 = InitialDataSerializer.build(serializer.build_grid(), config['initial'])
        if config['diagnostic'] == 'orbit':
            return self.run_orbit(config, u0)

        params = serializer.build_params()
        if config.get('target_budget') is not None:
            u0, eps = scale_to_budget(u0, params, config['target_budget'])
            params = replace(params, eps=eps)
            logger.info('data rescaled to eps = %.6e', eps)
        constant, contractive = contraction_budget(params)

        traj = picard_solve(u0, params)
        weighted = weighted_profile(traj.states, traj.times, params.rho)
        self.save_csv(config, ('t', 'weighted_norm', 'sup_norm', 'l2_norm'), traj.rows(weighted))

        residual = picard_residual(traj, u0, params)
        final_norm = trajectory_norm(traj, params)
        ratios = traj.ratios
        passed = residual < 2 * params.tol and 'unconverged' not in traj.flags
        if contractive:
            passed = passed and final_norm <= 2 * params.eps

        results = {}
        if config.get('perturbation'):
            v0 = u0 + GaussianSerializer.build(u0.grid, config['perturbation'])
            other = picard_solve(v0, params)
            curves = asymptotic_diag(traj, other, u0, v0, params)
            results['asymptotic'] = {'times': curves.times, 'difference': curves.values,
                                     'linear_difference': curves.reference}

        return report(self.command_name, config,
                      theta=params.theta, zeta=params.zeta,
                      eps=params.eps,
                      contraction_constant=constant,
                      budget=budget(params.rho, params.eps, constant),
                      contractive=contractive,
                      iterations=traj.iterations,
                      distances=traj.distances,
                      ratios=ratios,
                      weighted_history=traj.weighted_history,
                      final_weighted_norm=final_norm,
                      residual=residual,
                      flags=traj.flags,
                      passed=passed,
                      **results)

    def run_orbit(self, config, u0):
        orbit = config['orbit']
        curves = orbit_manifold_diag(u0, config['sigma'], orbit.get('times', ORBIT_TIMES),
                                     orbit.get('p', 1.0), pad_to=orbit.get('pad_to'))
        self.save_csv(config, ('t', 'orbit_distance'), zip(curves.times, curves.values))
        passed = curves.fitted_slope is None or abs(
            curves.fitted_slope - curves.expected_slope) <= 0.05
        return report(self.command_name, config,
                      projection=curves.projection,
                      times=curves.times,
                      distances=curves.values,
                      fitted_slope=curves.fitted_slope,
                      expected_slope=curves.expected_slope,
                      flags=curves.flags,
                      passed=passed)
