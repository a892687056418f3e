import logging

from grid.helpers import report
from grid.management.base import ConfigCommand
from grid.serializers import InitialDataSerializer
from propagator.operations import decay_scan
from propagator.serializers import DecayScanConfigSerializer
from spectral.serializers import build_interaction

logger = logging.getLogger('propagator')

NO_DECAY = 'no-decay (bound state)'


class Command(ConfigCommand):
    help = 'Sup norm of W(t)f against t with the fitted log-log slope'
    serializer_class = DecayScanConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--delta', type=float, metavar='SIGMA')
        parser.add_argument('--subtract', action='store_true', default=None,
                            dest='subtract_bound_states')
        parser.add_argument('--time', type=float, action='append', dest='times')

    def overrides(self, options) -> dict:
        config = {key: options.get(key) for key in ('subtract_bound_states', 'times')}
        if options.get('delta') is not None:
            config['interaction'] = {'kind': 'delta', 'sigma': options['delta']}
        return config

    def run(self, config, serializer):
        pi = build_interaction(config['interaction'])
        f = InitialDataSerializer.build(serializer.build_grid(), config['initial'])
        result = decay_scan(pi, f, config['times'],
                            subtract_bound_states=config['subtract_bound_states'],
                            pad_to=config.get('pad_to'), weak_p=config['weak_p'])
        self.save_csv(config, ('t', 'sup_norm', 'weak_lp_norm'), result.rows())

        if 'no_decay_expected' in result.flags:
            # the bound-state part keeps the norm up
            persists = bool(min(result.sup_norms) > 0.5 * result.bound_norm)
            verdict = NO_DECAY if persists else 'unexpected decay'
            passed = persists
        else:
            error = abs(result.fitted_slope - config['expected_slope'])
            passed = error <= config['slope_tolerance']
            verdict = 'pass' if passed else 'fail'
        logger.info('decay slope %.4f +- %.4f: %s', result.fitted_slope, result.slope_stderr,
                    verdict)

        return report(self.command_name, config,
                      interaction=pi.as_dict(),
                      times=result.times,
                      sup_norms=result.sup_norms,
                      weak_norms=result.weak_norms,
                      fitted_slope=result.fitted_slope,
                      slope_stderr=result.slope_stderr,
                      bound_norm=result.bound_norm,
                      flags=result.flags,
                      verdict=verdict,
                      passed=passed)
