import json
import math
from io import StringIO
from unittest import TestCase

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management import call_command
from faker import Faker
from scipy.integrate import quad, trapezoid

from grid.models import Grid, GridFunction, gaussian
from grid.operations import l2_norm, one_sided_derivative, one_sided_limit
from spectral.models import Delta, DeltaPrime, TwoDelta
from spectral.operations import (bound_states, eigenvalue_count_sweep,
                                 generalized_eigenfunction, generalized_fourier,
                                 lambert_w0, plancherel_defect, scattering,
                                 scattering_coefficients, two_delta_bisection,
                                 two_delta_residual)

Faker.seed(7)
fake = Faker()


class LambertTestCase(TestCase):

    def test_values(self):
        self.assertEqual(lambert_w0(0.0), 0.0)
        self.assertAlmostEqual(lambert_w0(math.e), 1.0, places=14)
        self.assertAlmostEqual(lambert_w0(1.0), 0.5671432904097838, places=12)
        self.assertEqual(lambert_w0(-math.exp(-1.0)), -1.0)

    def test_residual(self):
        for x in [-0.36, -0.2, -1e-3, 1e-6, 0.3, 2.0, 50.0, 1e4]:
            w = lambert_w0(x)
            self.assertGreaterEqual(w, -1.0)
            self.assertLessEqual(abs(w * math.exp(w) - x), 1e-14 * max(1.0, abs(x)))

    def test_random_residual(self):
        for _ in range(200):
            x = fake.random.uniform(-math.exp(-1.0), 20.0)
            w = lambert_w0(x)
            self.assertLessEqual(abs(w * math.exp(w) - x), 1e-14 * max(1.0, abs(x)))

    def test_domain(self):
        with self.assertRaises(ValidationError):
            lambert_w0(-0.5)


class BoundStatesTestCase(TestCase):

    def test_delta(self):
        states = bound_states(Delta(-2.0))
        self.assertEqual(len(states), 1)
        self.assertEqual(states[0].gamma, -1.0)
        self.assertAlmostEqual(states[0](0.0), 1.0)
        self.assertEqual(bound_states(Delta(1.0)), [])
        self.assertEqual(bound_states(Delta(0.0)), [])

    def test_deltaprime(self):
        states = bound_states(DeltaPrime(-2.0))
        self.assertEqual(len(states), 1)
        self.assertEqual(states[0].gamma, -1.0)
        self.assertEqual(bound_states(DeltaPrime(3.0)), [])

    def test_two_delta_single(self):
        states = bound_states(TwoDelta(-1.0, 1.5 - 0.7))
        self.assertEqual(len(states), 1)
        states = bound_states(TwoDelta(-1.0, 1.0 - 1e-3))
        self.assertEqual(len(states), 1)

    def test_two_delta_reference(self):
        alpha, a = -1.0, 1.0
        states = bound_states(TwoDelta(alpha, a))
        self.assertAlmostEqual(states[0].gamma, two_delta_bisection(alpha, a, 'even'),
                               delta=1e-10)
        expected = -0.25 * (lambert_w0(a * math.exp(-a)) + a) ** 2 / a ** 2
        self.assertAlmostEqual(states[0].gamma, expected, delta=1e-12)

    def test_two_delta_pair(self):
        alpha, a = -2.0, 1.5
        states = bound_states(TwoDelta(alpha, a))
        self.assertEqual([state.label for state in states], [1, 2])
        self.assertAlmostEqual(states[0].gamma, two_delta_bisection(alpha, a, 'even'),
                               delta=1e-10)
        self.assertAlmostEqual(states[1].gamma, two_delta_bisection(alpha, a, 'odd'),
                               delta=1e-10)
        self.assertLess(states[0].gamma, states[1].gamma)

    def test_two_delta_residuals(self):
        for _ in range(30):
            alpha = -fake.random.uniform(0.2, 4.0)
            a = fake.random.uniform(0.1, 4.0)
            for state in bound_states(TwoDelta(alpha, a)):
                self.assertLess(two_delta_residual(state.gamma, alpha, a), 1e-10)

    def test_excluded_line(self):
        pi = TwoDelta(-1.0, 1.0)
        self.assertTrue(pi.on_excluded_line)
        self.assertEqual(len(bound_states(pi)), 1)
        with self.assertRaises(ValidationError):
            pi.require_regular()
        TwoDelta(-1.0, 1.5).require_regular()
        with self.assertRaises(ValidationError):
            TwoDelta(1.0, -1.0)

    def test_residual_examples(self):
        self.assertLess(two_delta_residual(-1.0, -2.0, 50.0), 1e-8)
        self.assertGreater(two_delta_residual(-9.0, -1.0, 1.0), 1.0)

    def test_count_transition(self):
        alpha = -1.0
        a_values = np.linspace(0.5, 1.5, 50)
        counts = eigenvalue_count_sweep(alpha, a_values)
        for a, count in zip(a_values, counts):
            self.assertEqual(count, 1 if a < -1 / alpha else 2)

    def test_normalized(self):
        interactions = [Delta(-fake.random.uniform(0.5, 3)),
                        DeltaPrime(-fake.random.uniform(0.5, 3)),
                        TwoDelta(-1.5, 2.0)]
        for pi in interactions:
            for state in bound_states(pi):
                left = quad(lambda x: state(x) ** 2, -np.inf, 0)[0]
                right = quad(lambda x: state(x) ** 2, 0, np.inf)[0]
                self.assertAlmostEqual(left + right, 1.0, delta=1e-6)

    def test_eigen_ode(self):
        grid = Grid(0.5, 3.0, 2501)
        for pi in (Delta(-1.5), DeltaPrime(-1.0)):
            state = bound_states(pi)[0]
            values = state(grid.x)
            second = (values[2:] - 2 * values[1:-1] + values[:-2]) / grid.h ** 2
            np.testing.assert_allclose(-second, state.gamma * values[1:-1],
                                       atol=10 * grid.h ** 2)

    def test_deltaprime_jump(self):
        beta = -1.5
        grid = Grid.from_extent(1.0, 2001)
        state = bound_states(DeltaPrime(beta))[0]
        phi = GridFunction.from_callable(grid, state)
        jump = one_sided_limit(phi, 0.0, 1) - one_sided_limit(phi, 0.0, -1)
        slope = one_sided_derivative(phi, 0.0, -1, use_limit=True)
        self.assertAlmostEqual(jump.real, beta * slope.real, delta=1e-6)
        self.assertAlmostEqual(state(0.3), -state(-0.3))


class ScatteringTestCase(TestCase):

    def test_free(self):
        data = scattering(0.0, 1.0)
        self.assertEqual(data.t_coeff, 1)
        self.assertEqual(data.r_coeff, 0)

    def test_example(self):
        data = scattering(2.0, 1.0)
        self.assertAlmostEqual(data.t_coeff, (1 - 1j) / 2, places=14)
        self.assertAlmostEqual(data.r_coeff, (-1 - 1j) / 2, places=14)

    def test_degenerate(self):
        with self.assertRaises(ValidationError):
            scattering(0.0, 0.0)

    def test_identities(self):
        sigma = np.array([fake.random.uniform(-10, 10) for _ in range(1000)])
        lam = np.array([fake.random.uniform(-10, 10) for _ in range(1000)])
        t_plus, r_plus = scattering_coefficients(sigma, lam)
        t_minus, r_minus = scattering_coefficients(sigma, -lam)
        np.testing.assert_allclose(np.abs(t_plus) ** 2 + np.abs(r_plus) ** 2, 1, atol=1e-12)
        np.testing.assert_allclose(r_plus + 1, t_plus, atol=1e-12)
        np.testing.assert_allclose(r_minus * t_plus + r_plus * t_minus, 0, atol=1e-14)
        np.testing.assert_allclose(r_minus * r_plus + t_minus * t_plus, 1, atol=1e-14)


class EigenfunctionTestCase(TestCase):

    def test_free(self):
        x = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(generalized_eigenfunction(0.0, 1.3, x),
                                   np.exp(1.3j * x))

    def test_continuity_and_jump(self):
        sigma = 3.0
        grid = Grid.from_extent(1.0, 2001)
        for lam in (2.0, -2.0, 0.7):
            psi = GridFunction(grid, generalized_eigenfunction(sigma, lam, grid.x))
            right = generalized_eigenfunction(sigma, lam, 1e-15)
            left = generalized_eigenfunction(sigma, lam, -1e-15)
            self.assertAlmostEqual(abs(right - left), 0.0, delta=1e-12)
            jump = one_sided_derivative(psi, 0.0, 1) - one_sided_derivative(psi, 0.0, -1)
            value = psi.values[grid.index_of(0.0)]
            self.assertAlmostEqual(abs(jump - sigma * value), 0.0, delta=1e-8)


class GeneralizedFourierTestCase(TestCase):

    def test_classical(self):
        grid = Grid.from_extent(12.0, 4801)
        lambdas = np.linspace(-6, 6, 61)
        transform = generalized_fourier(gaussian(grid), 0.0, lambdas)
        np.testing.assert_allclose(transform.values,
                                   np.exp(-lambdas ** 2 / 4) / np.sqrt(2), atol=1e-6)
        self.assertEqual(transform.flags, frozenset())

    def test_orthogonal_to_bound_state(self):
        sigma = -2.0
        grid = Grid.from_extent(30.0, 12001)
        psi = GridFunction.from_callable(grid, bound_states(Delta(sigma))[0])
        transform = generalized_fourier(psi, sigma, np.linspace(-10, 10, 201))
        self.assertLess(np.max(np.abs(transform.values)), 1e-4)

    def test_plancherel(self):
        grid = Grid.from_extent(12.0, 4801)
        f = gaussian(grid)
        lambdas = np.linspace(-20, 20, 1601)
        transform = generalized_fourier(f, 3.0, lambdas)
        total = trapezoid(np.abs(transform.values) ** 2, lambdas)
        self.assertAlmostEqual(total, l2_norm(f) ** 2, delta=1e-3)

    def test_completeness_with_bound_state(self):
        grid = Grid.from_extent(14.0, 5601)
        f = gaussian(grid, center=1.0)
        defect = plancherel_defect(f, -2.0, np.linspace(-20, 20, 1601))
        self.assertLess(abs(defect), 2e-3)

    def test_decay_flag(self):
        grid = Grid.from_extent(2.0, 401)
        transform = generalized_fourier(gaussian(grid, width=3.0), 1.0, [0.0, 1.0])
        self.assertIn('insufficient_decay', transform.flags)


class SpectrumCommandTestCase(TestCase):

    @staticmethod
    def spectrum(*args) -> dict:
        out = StringIO()
        call_command('spectrum', *args, stdout=out)
        return json.loads(out.getvalue())

    def test_delta(self):
        result = self.spectrum('--delta', '-2')
        self.assertAlmostEqual(result['eigenvalues'][0], -1.0, places=14)
        self.assertEqual(len(result['eigenvalues']), 1)
        self.assertAlmostEqual(result['norms'][0], 1.0, places=6)
        self.assertTrue(result['passed'])

        sigma = fake.random.uniform(0.1, 5.0)
        repulsive = self.spectrum('--delta', str(sigma))
        self.assertEqual(repulsive['eigenvalues'], [])
        self.assertTrue(repulsive['passed'])

    def test_delta_prime(self):
        result = self.spectrum('--delta-prime', '-2')
        self.assertAlmostEqual(result['eigenvalues'][0], -1.0, places=14)

    def test_two_delta(self):
        result = self.spectrum('--two-delta', '-1', '--a', '1')
        self.assertEqual(len(result['eigenvalues']), 1)
        self.assertAlmostEqual(result['eigenvalues'][0], -0.40853, delta=2e-4)
        self.assertAlmostEqual(result['eigenvalues'][0], two_delta_bisection(-1.0, 1.0, 'even'),
                               places=10)
        self.assertLessEqual(result['residuals'][0], 1e-10)
        self.assertEqual(result['interaction'], {'kind': 'two_delta', 'alpha': -1.0, 'a': 1.0})
