"""Acceptance suite over all apps; each check reports its numbers and a verdict"""
import logging
from dataclasses import replace

import numpy as np
from faker import Faker

from grid.helpers import report
from grid.management.base import ConfigCommand
from grid.models import Grid, GridFunction, gaussian
from grid.operations import l2_norm
from grid.serializers import VerifyConfigSerializer
from lorentz.operations import bound_state_lorentz_norm, lorentz_norm
from nls.models import SolverParams, weight_exponents
from nls.operations import orbit_manifold_diag, picard_solve, scale_to_budget, trajectory_norm
from propagator.models import PropagatorMethod
from propagator.operations import (decay_scan, delta_propagate, deltaprime_propagate,
                                   free_propagate)
from spectral.models import Delta, DeltaPrime, TwoDelta
from spectral.operations import (bound_states, eigenvalue_count_sweep, scattering_coefficients,
                                 two_delta_bisection)
from wiener.models import AtomicMeasure, FourierCoeffs
from wiener.operations import (galerkin_reference, l1_convolve, lipschitz_bound,
                               measure_convolve, periodic_picard_solve)

logger = logging.getLogger('grid')


def check_scattering(fake, instances):
    sigma = np.array([fake.random.uniform(-10, 10) for _ in range(instances)])
    lam = np.array([fake.random.uniform(0.01, 10) * fake.random.choice((-1, 1))
                    for _ in range(instances)])
    t_plus, r_plus = scattering_coefficients(sigma, lam)
    t_minus, r_minus = scattering_coefficients(sigma, -lam)
    errors = {
        'unitarity': np.max(np.abs(np.abs(t_plus) ** 2 + np.abs(r_plus) ** 2 - 1)),
        'transmission': np.max(np.abs(r_plus + 1 - t_plus)),
        'cross': np.max(np.abs(r_minus * t_plus + r_plus * t_minus)),
        'product': np.max(np.abs(r_minus * r_plus + t_minus * t_plus - 1)),
    }
    passed = (errors['unitarity'] <= 1e-12 and errors['transmission'] <= 1e-12
              and errors['cross'] <= 1e-14 and errors['product'] <= 1e-14)
    return {**errors, 'passed': passed}


def check_spectrum(fake, instances):
    delta = bound_states(Delta(-2.0))[0].gamma
    deltaprime = bound_states(DeltaPrime(-2.0))[0].gamma
    pair = bound_states(TwoDelta(-1.0, 1.0))
    reference = two_delta_bisection(-1.0, 1.0, 'even')
    a_values = np.linspace(0.5, 1.5, 50)
    counts = eigenvalue_count_sweep(-1.0, a_values)
    expected = [1 if a < 1.0 else 2 for a in a_values]
    passed = (abs(delta + 1) <= 1e-14 and abs(deltaprime + 1) <= 1e-14 and len(pair) == 1
              and abs(pair[0].gamma - reference) <= 1e-10 and counts == expected)
    return {'delta': delta, 'delta_prime': deltaprime,
            'two_delta': [state.gamma for state in pair], 'bisection': reference,
            'sweep_counts': counts, 'passed': passed}


def check_oracles(fake, instances):
    grid = Grid.from_extent(40.0, 4001)
    worst = 0.0
    for _ in range(5):
        f = gaussian(grid, center=fake.random.uniform(-4.0, -2.0))
        for sigma in (0.5, 1.0, 2.0):
            for t in (0.2, 0.7):
                solutions = [delta_propagate(f, sigma, t, method)
                             for method, _ in PropagatorMethod.choices]
                worst = max(worst, l2_norm(solutions[0] - solutions[1]),
                            l2_norm(solutions[0] - solutions[2]),
                            l2_norm(solutions[1] - solutions[2]))
    return {'max_l2_difference': worst, 'passed': worst < 1e-4}


def check_unitarity(fake, instances):
    grid = Grid.from_extent(40.0, 4001)
    f = gaussian(grid, center=fake.random.uniform(-3.0, 0.0))
    free = max(abs(l2_norm(free_propagate(f, t)) - l2_norm(f)) for t in (0.3, 1.0, 2.0))
    delta = max(abs(l2_norm(delta_propagate(f, sigma, 0.5)) - l2_norm(f))
                for sigma in (0.5, 2.0, -1.0))
    return {'free': free, 'delta': delta, 'passed': free <= 1e-10 and delta <= 1e-4}


def check_decay(fake, instances):
    grid = Grid.from_extent(20.0, 2001)
    left = gaussian(grid, center=-3.0)
    free = decay_scan(Delta(0.0), gaussian(grid), np.geomspace(1, 8, 6)).fitted_slope
    repulsive = decay_scan(Delta(1.0), left, np.geomspace(2, 16, 6)).fitted_slope
    f = gaussian(grid, center=0.5)
    times = np.geomspace(1, 8, 5)
    kept = decay_scan(Delta(-1.0), f, times)
    removed = decay_scan(Delta(-1.0), f, times, subtract_bound_states=True).fitted_slope
    persists = bool(np.all(kept.sup_norms > 0.5 * kept.bound_norm))
    deltaprime = decay_scan(DeltaPrime(1.0), f, times).fitted_slope
    two_delta = decay_scan(TwoDelta(1.0, 1.0), f, times).fitted_slope
    slopes = (free, repulsive, removed, deltaprime, two_delta)
    passed = persists and all(abs(slope + 0.5) <= 0.05 for slope in slopes)
    return {'free': free, 'repulsive': repulsive, 'bound_state_persists': persists,
            'subtracted': removed, 'delta_prime': deltaprime, 'two_delta': two_delta,
            'passed': passed}


def check_phases(fake, instances):
    grid = Grid.from_extent(24.0, 16001)
    psi = GridFunction.from_callable(grid, bound_states(Delta(-2.0))[0])
    other = Grid.from_extent(30.0, 6001)
    phi = GridFunction.from_callable(other, bound_states(DeltaPrime(-2.0))[0])
    delta, deltaprime = 0.0, 0.0
    for t in (0.5, 1.0, 2.0):
        delta = max(delta, l2_norm(delta_propagate(psi, -2.0, t) - psi * np.exp(1j * t)))
        deltaprime = max(deltaprime,
                         l2_norm(deltaprime_propagate(phi, -2.0, t) - phi * np.exp(1j * t)))
    return {'delta': delta, 'delta_prime': deltaprime,
            'passed': delta < 1e-4 and deltaprime < 1e-4}


def check_weak_lp(fake, instances):
    identities = {}
    for rho in (4, 5, 6, 7):
        theta, zeta = weight_exponents(rho)
        identities[rho] = 1 - zeta - theta * rho == -theta
    grid = Grid.from_extent(20.0, 2001)
    params = SolverParams(rho=5, eps=0.1, times=tuple(np.geomspace(0.05, 2.0, 6)), sigma=1.0)
    u0, eps = scale_to_budget(gaussian(grid, center=-3.0), params, 0.5)
    params = replace(params, eps=eps)
    traj = picard_solve(u0, params)
    final = trajectory_norm(traj, params)
    ratios = traj.ratios
    passed = all(identities.values()) and bool(np.all(ratios <= 0.6)) and final <= 2 * eps
    theta, zeta = weight_exponents(5)
    return {'identities': identities, 'theta': str(theta), 'zeta': str(zeta),
            'ratios': ratios, 'final_weighted_norm': final, 'eps': eps, 'passed': passed}


def check_lorentz(fake, instances):
    rows, passed = [], True
    for p, q in ((1, 1), (2, 2), (3, 2)):
        expected = bound_state_lorentz_norm(-2.0, p, q)
        errors = [abs(lorentz_norm(GridFunction.from_callable(
            Grid.from_extent(40.0, n), bound_states(Delta(-2.0))[0]), p, q) - expected)
                  for n in (20001, 40001)]
        passed = passed and errors[1] <= 5e-3 and errors[1] <= 0.75 * errors[0]
        rows.append({'p': p, 'q': q, 'errors': errors})
    return {'norms': rows, 'passed': passed}


def _random_coeffs(fake):
    offset = fake.random.randint(-4, 4)
    return FourierCoeffs(offset, [complex(fake.random.gauss(0, 1), fake.random.gauss(0, 1))
                                  for _ in range(fake.random.randint(1, 6))])


def _random_measure(fake):
    return AtomicMeasure.from_pairs(
        (fake.random.uniform(-3, 3), complex(fake.random.gauss(0, 1), fake.random.gauss(0, 1)))
        for _ in range(fake.random.randint(1, 6)))


def check_wiener(fake, instances):
    u0, mu = FourierCoeffs.unit(1, 0.05), FourierCoeffs.unit(0, 0.1)
    traj = periodic_picard_solve(u0, mu, rho=2, T=0.5)
    error = (traj.final - galerkin_reference(u0, mu, rho=2, T=0.5)).l1_norm()

    lipschitz = []
    u = periodic_picard_solve(u0, mu, rho=2, T=0.5, n_times=8)
    for _ in range(5):
        v0 = u0 + FourierCoeffs.unit(fake.random.randint(-2, 2),
                                     complex(fake.random.uniform(-5e-3, 5e-3),
                                             fake.random.uniform(-5e-3, 5e-3)))
        v = periodic_picard_solve(v0, mu, rho=2, T=0.5, n_times=8)
        lipschitz.append(u.sup_distance(v) / (u0 - v0).l1_norm()
                         <= lipschitz_bound(u0, v0, mu, 2, 0.5) * (1 + 1e-9))

    young = True
    for _ in range(instances):
        f, g = _random_coeffs(fake), _random_coeffs(fake)
        young = young and l1_convolve(f, g).l1_norm() <= f.l1_norm() * g.l1_norm() + 1e-12
        mu_atoms, nu_atoms = _random_measure(fake), _random_measure(fake)
        young = young and (measure_convolve(mu_atoms, nu_atoms).total_variation()
                           <= mu_atoms.total_variation() * nu_atoms.total_variation() + 1e-12)

    passed = traj.sup_norm() <= 0.1 and error < 1e-5 and all(lipschitz) and young
    return {'sup_norm': traj.sup_norm(), 'reference_error': error, 'q': traj.q,
            'lipschitz': lipschitz, 'young': young, 'passed': passed}


def check_orbit(fake, instances):
    sigma = -1.0
    grid = Grid.from_extent(20.0, 2001)
    psi = GridFunction.from_callable(grid, bound_states(Delta(sigma))[0])
    curves = orbit_manifold_diag(psi + gaussian(grid, center=-3.0), sigma,
                                 np.geomspace(1, 100, 6))
    passed = curves.fitted_slope is not None and abs(curves.fitted_slope + 0.5) <= 0.05
    return {'fitted_slope': curves.fitted_slope, 'distances': curves.values, 'passed': passed}


CHECKS = {
    'scattering': check_scattering,
    'spectrum': check_spectrum,
    'oracles': check_oracles,
    'unitarity': check_unitarity,
    'decay': check_decay,
    'phases': check_phases,
    'weak_lp': check_weak_lp,
    'lorentz': check_lorentz,
    'wiener': check_wiener,
    'orbit': check_orbit,
}


class Command(ConfigCommand):
    help = 'Run the acceptance checks of every app'
    serializer_class = VerifyConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--only', action='append', choices=VerifyConfigSerializer.CHECKS)
        parser.add_argument('--instances', type=int)

    def overrides(self, options) -> dict:
        return {key: options.get(key) for key in ('only', 'instances')}

    def run(self, config, serializer):
        Faker.seed(config['seed'])
        fake = Faker()

        results = {}
        for name in config['only']:
            results[name] = CHECKS[name](fake, config['instances'])
            logger.info('%s: %s', name, 'pass' if results[name]['passed'] else 'FAIL')

        self.save_csv(config, ('check', 'passed'),
                      ((name, result['passed']) for name, result in results.items()))
        return report(self.command_name, config,
                      checks=results,
                      passed=all(result['passed'] for result in results.values()))
