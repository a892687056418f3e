import math
from unittest import TestCase

import numpy as np
from django.core.exceptions import ValidationError
from faker import Faker
from scipy.integrate import quad, trapezoid

from grid.models import Grid, GridFunction, gaussian
from grid.operations import l2_norm, reflect
from propagator.models import PropagatorMethod
from propagator.operations import (boundary_jump, decay_scan, delta_propagate,
                                   deltaprime_propagate, exponential_tail, filon_rule,
                                   free_kernel, free_propagate, free_propagate_kinked,
                                   kernel_tail, laguerre_tail, propagate, reflection_density,
                                   twodelta_propagate)
from spectral.models import Delta, DeltaPrime, TwoDelta
from spectral.operations import bound_states, scattering_coefficients

Faker.seed(11)
fake = Faker()


def left_gaussian(grid, center=-3.0, width=1.0):
    return gaussian(grid, center=center, width=width)


def complex_quad(fn, a, b):
    options = {'limit': 400, 'epsabs': 1e-12, 'epsrel': 1e-10}
    real = quad(lambda u: fn(u).real, a, b, **options)[0]
    imag = quad(lambda u: fn(u).imag, a, b, **options)[0]
    return real + 1j * imag


class FreePropagatorTestCase(TestCase):

    def setUp(self):
        self.grid = Grid.from_extent(40.0, 4001)

    def test_identity_at_zero(self):
        f = gaussian(self.grid)
        self.assertIs(free_propagate(f, 0.0), f)

    def test_unitary(self):
        f = gaussian(self.grid, center=fake.random.uniform(-3, 3), amplitude=1 + 2j)
        for t in (0.3, -1.2, 4.0):
            self.assertAlmostEqual(l2_norm(free_propagate(f, t)), l2_norm(f), delta=1e-10)

    def test_gaussian_evolution(self):
        u = free_propagate(gaussian(self.grid), 1.0)
        x = self.grid.x
        expected = np.exp(-x ** 2 / (1 + 4j)) / np.sqrt(1 + 4j)
        self.assertLess(np.max(np.abs(u.values - expected)), 1e-8)

    def test_kernel(self):
        x = np.linspace(-5, 5, 11)
        t = fake.random.uniform(0.1, 2.0)
        np.testing.assert_allclose(np.abs(free_kernel(x, t)), (4 * math.pi * t) ** -0.5)
        np.testing.assert_allclose(free_kernel(x, -t), np.conj(free_kernel(x, t)))
        with self.assertRaises(ValidationError):
            free_kernel(x, 0.0)

    def test_boundary_flag(self):
        grid = Grid.from_extent(3.0, 301)
        u = free_propagate(gaussian(grid, width=2.0), 0.5)
        self.assertIn('boundary_mass', u.flags)

    def test_corner_subtraction(self):
        t = 0.6
        f = GridFunction.from_callable(
            self.grid, lambda x: np.exp(-np.abs(x)) + np.exp(-(x - 1) ** 2))
        u = free_propagate_kinked(f, t)
        x = self.grid.x
        expected = (exponential_tail(1.0, -x, t) + exponential_tail(1.0, x, t)
                    + np.exp(-(x - 1) ** 2 / (1 + 4j * t)) / np.sqrt(1 + 4j * t))
        self.assertLess(np.max(np.abs(u.values - expected)), 1e-7)

    def test_corner_free_data(self):
        f = gaussian(self.grid, center=0.3)
        u = free_propagate_kinked(f, 0.8)
        self.assertLess(np.max(np.abs(u.values - free_propagate(f, 0.8).values)), 1e-9)


class ExponentialTailTestCase(TestCase):

    def test_against_direct_integration(self):
        b, t = 2.0, 0.5
        for shift in (1.0, 0.0, -1.0):
            direct = complex_quad(
                lambda u: np.exp(-b * u) * free_kernel(u + shift, t), 0, 60)
            self.assertAlmostEqual(abs(exponential_tail(b, shift, t) - direct), 0.0, delta=1e-8)

    def test_laguerre_agrees(self):
        shift = np.linspace(0, 20, 41)
        for b in (0.25, 1.0, 5.0):
            for t in (0.2, -0.7, 2.0):
                closed = exponential_tail(b, shift, t)
                rotated = laguerre_tail(b, shift, t, 256)
                np.testing.assert_allclose(rotated, closed, atol=1e-8)

    def test_large_damping(self):
        b, t, shift = 1e4, 0.5, 2.0
        tail = exponential_tail(b, shift, t)
        self.assertAlmostEqual(abs(tail * b / free_kernel(shift, t) - 1), 0.0, delta=1e-3)

    def test_adaptive_order(self):
        shift = np.linspace(0, 30, 61)
        tail, flags = kernel_tail(0.5, shift, 0.7)
        self.assertEqual(flags, frozenset())
        np.testing.assert_allclose(tail, exponential_tail(0.5, shift, 0.7), atol=1e-7)
        tail, flags = kernel_tail(0.5, -shift, 0.7)
        np.testing.assert_allclose(tail, exponential_tail(0.5, -shift, 0.7))

    def test_rotation_needs_nonnegative_shift(self):
        with self.assertRaises(ValidationError):
            laguerre_tail(1.0, [-1.0], 0.5, 64)


class DeltaPropagatorTestCase(TestCase):

    def test_density_transforms(self):
        grid = Grid.from_extent(60.0, 120001)
        lambdas = np.linspace(-3, 3, 13)
        for sigma in (1.0, -1.5):
            rho = reflection_density(sigma, grid).values
            transform = trapezoid(rho[None, :] * np.exp(-1j * lambdas[:, None] * grid.x[None, :]),
                                  dx=grid.h, axis=1)
            t_coeff, r_coeff = scattering_coefficients(sigma, lambdas)
            np.testing.assert_allclose(transform, r_coeff, atol=1e-6)
            np.testing.assert_allclose(1 + transform, t_coeff, atol=1e-6)

    def test_free_limit(self):
        grid = Grid.from_extent(40.0, 4001)
        f = left_gaussian(grid)
        u = delta_propagate(f, 0.0, 0.7)
        self.assertLess(np.max(np.abs(u.values - free_propagate(f, 0.7).values)), 1e-10)

    def test_identity_at_zero(self):
        f = left_gaussian(Grid.from_extent(20.0, 2001))
        self.assertIs(delta_propagate(f, 1.0, 0.0), f)
        with self.assertRaises(ValidationError):
            delta_propagate(f, 1.0, 0.0, PropagatorMethod.KERNEL)

    def test_bound_state_phase(self):
        sigma = -2.0
        grid = Grid.from_extent(24.0, 16001)
        psi = GridFunction.from_callable(grid, bound_states(Delta(sigma))[0])
        for t in (0.5, 1.0, 2.0):
            expected = psi * np.exp(1j * t)
            closed = delta_propagate(psi, sigma, t)
            self.assertLess(np.max(np.abs(closed.values - expected.values)), 2e-5)
            kernel = delta_propagate(psi, sigma, t, PropagatorMethod.KERNEL)
            self.assertLess(l2_norm(kernel - expected), 1e-4)

    def test_methods_agree(self):
        grid = Grid.from_extent(40.0, 4001)
        f = left_gaussian(grid)
        t = 0.7
        solutions = [delta_propagate(f, 1.0, t, method)
                     for method, _ in PropagatorMethod.choices]
        self.assertLess(l2_norm(solutions[0] - solutions[1]), 1e-4)
        self.assertLess(l2_norm(solutions[0] - solutions[2]), 1e-4)
        self.assertLess(l2_norm(solutions[1] - solutions[2]), 1e-4)

    def test_data_on_both_half_lines(self):
        grid = Grid.from_extent(40.0, 4001)
        f = left_gaussian(grid) + gaussian(grid, center=1.5, amplitude=0.5j)
        t = 0.6
        closed = delta_propagate(f, 1.0, t)
        kernel = delta_propagate(f, 1.0, t, PropagatorMethod.KERNEL)
        self.assertLess(l2_norm(closed - kernel), 1e-4)
        mirrored = delta_propagate(reflect(f), 1.0, t)
        self.assertLess(np.max(np.abs(mirrored.values - closed.values[::-1])), 1e-10)

    def test_unitary(self):
        grid = Grid.from_extent(40.0, 4001)
        for sigma in (0.5, 2.0, -1.0):
            f = gaussian(grid, center=fake.random.uniform(-3, 0))
            u = delta_propagate(f, sigma, 0.5)
            self.assertAlmostEqual(l2_norm(u), l2_norm(f), delta=1e-4)

    def test_group_property(self):
        grid = Grid.from_extent(25.0, 12501)
        f = left_gaussian(grid)
        t1, t2 = 0.3, 0.4
        twice = delta_propagate(delta_propagate(f, 1.0, t1), 1.0, t2)
        once = delta_propagate(f, 1.0, t1 + t2)
        self.assertLess(l2_norm(twice - once), 1e-5)

    def test_boundary_condition(self):
        grid = Grid.from_extent(30.0, 6001)
        sigma = 1.0
        # f(0) = f'(0) = 0 puts f in the operator domain
        f = GridFunction.from_callable(grid, lambda x: x ** 2 * np.exp(-(x + 1) ** 2))
        u = delta_propagate(f, sigma, 0.5)
        self.assertLess(abs(boundary_jump(u, sigma)), 2e-3)

    def test_dispatch(self):
        grid = Grid.from_extent(20.0, 2001)
        f = left_gaussian(grid)
        np.testing.assert_array_equal(propagate(Delta(1.0), f, 0.5).values,
                                      delta_propagate(f, 1.0, 0.5).values)
        with self.assertRaises(ValidationError):
            propagate(DeltaPrime(1.0), f, 0.5, PropagatorMethod.SPECTRAL)


class DeltaPrimePropagatorTestCase(TestCase):

    def test_unitary(self):
        grid = Grid.from_extent(30.0, 3001)
        f = gaussian(grid, center=0.5)
        u = deltaprime_propagate(f, 1.0, 0.5)
        self.assertAlmostEqual(l2_norm(u), l2_norm(f), delta=1e-4)

    def test_bound_state_phase(self):
        beta = -2.0
        grid = Grid.from_extent(30.0, 6001)
        phi = GridFunction.from_callable(grid, bound_states(DeltaPrime(beta))[0])
        for t in (0.5, 1.0, 2.0):
            u = deltaprime_propagate(phi, beta, t)
            self.assertLess(l2_norm(u - phi * np.exp(1j * t)), 1e-4)

    def test_odd_stays_odd(self):
        grid = Grid.from_extent(20.0, 2001)
        f = GridFunction.from_callable(grid, lambda x: x * np.exp(-x ** 2))
        u = deltaprime_propagate(f, 1.0, 0.4)
        self.assertLess(np.max(np.abs(u.values + u.values[::-1])), 1e-6)

    def test_free_limits(self):
        grid = Grid.from_extent(20.0, 2001)
        f = gaussian(grid, center=0.7)
        free = free_propagate(f, 0.5)
        np.testing.assert_array_equal(deltaprime_propagate(f, 0.0, 0.5).values, free.values)
        self.assertLess(l2_norm(deltaprime_propagate(f, 1e-3, 0.5) - free), 1e-2)

    def test_zero_time(self):
        grid = Grid.from_extent(20.0, 201)
        with self.assertRaises(ValidationError):
            deltaprime_propagate(gaussian(grid), 1.0, 0.0)


class FilonTestCase(TestCase):

    def test_quadratic_exact(self):
        t = 0.8
        edges = np.linspace(0.0, 6.0, 61)
        nodes, weights = filon_rule(edges, t)
        for q in (lambda xi: np.ones_like(xi), lambda xi: 1 + 2 * xi - xi ** 2):
            exact = complex_quad(lambda xi: np.exp(-1j * t * xi ** 2) * q(xi), 0.0, 6.0)
            self.assertAlmostEqual(abs(np.sum(weights * q(nodes)) - exact), 0.0, delta=1e-9)

    def test_smooth_amplitude(self):
        t = -1.3
        edges = np.linspace(0.0, 10.0, 401)
        nodes, weights = filon_rule(edges, t)
        exact = complex_quad(lambda xi: np.exp(-1j * t * xi ** 2) / (1 + xi ** 2), 0.0, 10.0)
        self.assertAlmostEqual(abs(np.sum(weights / (1 + nodes ** 2)) - exact), 0.0, delta=1e-7)


class TwoDeltaPropagatorTestCase(TestCase):

    def setUp(self):
        self.grid = Grid.from_extent(12.0, 1201)

    def test_weak_coupling(self):
        f = gaussian(self.grid, center=0.4)
        u = twodelta_propagate(f, 1e-6, 1.0, 0.5)
        self.assertLess(l2_norm(u - free_propagate(f, 0.5)), 1e-4)

    def test_even_stays_even(self):
        f = gaussian(self.grid)
        u = twodelta_propagate(f, 1.0, 1.0, 0.5)
        self.assertLess(np.max(np.abs(u.values - u.values[::-1])), 1e-5)

    def test_unitary(self):
        f = gaussian(self.grid, center=0.3)
        u = twodelta_propagate(f, 1.0, 1.0, 0.5)
        self.assertAlmostEqual(l2_norm(u), l2_norm(f), delta=1e-3)

    def test_attractive_unitary(self):
        f = gaussian(self.grid, center=-0.5)
        u = twodelta_propagate(f, -1.5, 1.5, 0.5)
        self.assertAlmostEqual(l2_norm(u), l2_norm(f), delta=1e-3)

    def test_bound_state_phase(self):
        pi = TwoDelta(-2.0, 1.0)
        state = bound_states(pi)[0]
        f = GridFunction.from_callable(self.grid, state)
        t = 0.5
        u = twodelta_propagate(f, pi.alpha, pi.a, t)
        self.assertLess(l2_norm(u - f * state.phase(t)), 1e-3)

    def test_errors(self):
        f = gaussian(self.grid)
        with self.assertRaises(ValidationError):
            twodelta_propagate(f, -1.0, 1.0, 0.5)
        with self.assertRaises(ValidationError):
            twodelta_propagate(f, 1.0, 1.0, 0.0)


class DecayScanTestCase(TestCase):

    def setUp(self):
        self.grid = Grid.from_extent(20.0, 2001)

    def test_free(self):
        result = decay_scan(Delta(0.0), gaussian(self.grid), np.geomspace(1, 8, 6))
        self.assertAlmostEqual(result.fitted_slope, -0.5, delta=0.02)
        self.assertEqual(len(list(result.rows())), 6)
        self.assertTrue(np.all(result.sup_norms > 0))

    def test_repulsive(self):
        result = decay_scan(Delta(1.0), left_gaussian(self.grid), np.geomspace(2, 16, 6))
        self.assertAlmostEqual(result.fitted_slope, -0.5, delta=0.05)

    def test_attractive(self):
        f = gaussian(self.grid, center=0.5)
        times = np.geomspace(1, 8, 5)
        kept = decay_scan(Delta(-1.0), f, times)
        self.assertIn('no_decay_expected', kept.flags)
        self.assertTrue(np.all(kept.sup_norms > 0.5 * kept.bound_norm))

        removed = decay_scan(Delta(-1.0), f, times, subtract_bound_states=True)
        self.assertNotIn('no_decay_expected', removed.flags)
        self.assertAlmostEqual(removed.fitted_slope, -0.5, delta=0.05)

    def test_invalid_times(self):
        with self.assertRaises(ValidationError):
            decay_scan(Delta(1.0), gaussian(self.grid), [2.0, 1.0])
        with self.assertRaises(ValidationError):
            decay_scan(Delta(1.0), gaussian(self.grid), [1.0])

    def test_bound_state_persists(self):
        # the bound part dominates the radiation from the first scanned time on
        psi = GridFunction.from_callable(self.grid, bound_states(Delta(-1.0))[0])
        f = psi + gaussian(self.grid, center=0.5)
        result = decay_scan(Delta(-1.0), f, np.geomspace(2, 16, 5))
        self.assertGreater(result.fitted_slope, -0.1)

    def test_deltaprime(self):
        result = decay_scan(DeltaPrime(1.0), gaussian(self.grid, center=0.5),
                            np.geomspace(1, 8, 5))
        self.assertNotIn('no_decay_expected', result.flags)
        self.assertAlmostEqual(result.fitted_slope, -0.5, delta=0.1)

    def test_two_delta(self):
        result = decay_scan(TwoDelta(1.0, 1.0), gaussian(self.grid, center=0.5),
                            np.geomspace(1, 8, 5))
        self.assertNotIn('no_decay_expected', result.flags)
        self.assertAlmostEqual(result.fitted_slope, -0.5, delta=0.1)
