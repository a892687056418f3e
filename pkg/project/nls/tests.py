import math
from dataclasses import replace
from fractions import Fraction
from unittest import TestCase

import numpy as np
from django.core.exceptions import ValidationError
from faker import Faker
from scipy.special import beta

from grid.exceptions import NumericalFailure
from grid.models import Grid, GridFunction, gaussian
from grid.operations import extend
from nls.models import SolverParams, Trajectory
from nls.operations import (RHO0, asymptotic_diag, beta_function, contraction_budget,
                            dispersive_constant, duhamel_nonlinear, exponents, is_contractive,
                            linear_trajectory, nonlinearity, orbit_manifold_diag,
                            picard_residual, picard_solve, scale_to_budget, trajectory_norm,
                            weighted_norm)
from propagator.operations import delta_propagate
from spectral.models import Delta
from spectral.operations import bound_states

Faker.seed(5)
fake = Faker()


def geometric_times(t_min=0.05, t_max=2.0, n=6):
    return tuple(np.geomspace(t_min, t_max, n))


class ExponentsTestCase(TestCase):

    def test_values(self):
        theta, zeta, rho0 = exponents(5)
        self.assertEqual(theta, Fraction(1, 6))
        self.assertEqual(zeta, Fraction(1, 3))
        self.assertEqual(exponents(3)[:2], (Fraction(3, 8), Fraction(1, 4)))
        self.assertAlmostEqual(rho0, 3.5615528128088303, places=14)

    def test_identity(self):
        for rho in (4, 5, 6, 7, Fraction(9, 2)):
            theta, zeta, _ = exponents(rho)
            self.assertEqual(1 - zeta - theta * rho, -theta)

    def test_global_regime_threshold(self):
        for rho in (3.6, 4, 10):
            theta, zeta, _ = exponents(rho)
            self.assertLess(zeta, 1)
            self.assertLess(theta * Fraction(rho), 1)
        theta, _, _ = exponents(3)
        self.assertGreaterEqual(theta * 3, 1)
        self.assertGreater(RHO0 ** 2 - 3 * RHO0 - 2, -1e-12)

    def test_rho_must_exceed_one(self):
        with self.assertRaises(ValidationError):
            exponents(1)


class BetaFunctionTestCase(TestCase):

    def test_values(self):
        self.assertAlmostEqual(beta_function(1, 1), 1.0, places=12)
        self.assertAlmostEqual(beta_function(0.5, 0.5), math.pi, delta=1e-10)
        self.assertAlmostEqual(beta_function(2, 3), 1 / 12, places=12)

    def test_against_gamma_identity(self):
        self.assertAlmostEqual(beta_function(2 / 3, 1 / 6), beta(2 / 3, 1 / 6), delta=1e-8)
        for _ in range(10):
            nu, eta = fake.random.uniform(0.1, 3), fake.random.uniform(0.1, 3)
            self.assertAlmostEqual(beta_function(nu, eta) / beta(nu, eta), 1.0, delta=1e-6)

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            beta_function(0, 1)


class ContractionBudgetTestCase(TestCase):

    def test_constant(self):
        params = SolverParams(rho=5, eps=0.1, times=(1.0,))
        constant, contractive = contraction_budget(params, c_disp=1.0)
        self.assertAlmostEqual(constant, beta(2 / 3, 1 / 6), delta=1e-8)
        self.assertTrue(contractive)

    def test_small_data(self):
        params = SolverParams(rho=5, eps=1e-6, times=(1.0,))
        self.assertTrue(contraction_budget(params, c_disp=10.0)[1])
        self.assertFalse(contraction_budget(replace(params, eps=10.0), c_disp=10.0)[1])

    def test_strict_boundary(self):
        # 2^5 * 0.5^4 * 0.5 == 1 exactly
        self.assertFalse(is_contractive(5, 0.5, 0.5))
        self.assertTrue(is_contractive(5, 0.5, 0.4999))

    def test_outside_global_regime(self):
        params = SolverParams(rho=3, eps=0.1, times=(1.0,))
        with self.assertRaisesRegex(ValidationError, 'outside global regime'):
            contraction_budget(params, c_disp=1.0)

    def test_dispersive_constant(self):
        constant = dispersive_constant(1.0)
        self.assertGreater(constant, 0.2)
        self.assertLess(constant, 0.5)
        # the free bound is (4 pi)^(-1/2)
        self.assertLessEqual(dispersive_constant(0.0), 1 / math.sqrt(4 * math.pi) + 1e-3)


class SolverParamsTestCase(TestCase):

    def test_exponents(self):
        params = SolverParams(rho=5, eps=0.1, times=(0.5, 1.0))
        self.assertAlmostEqual(params.theta, 1 / 6)
        self.assertAlmostEqual(params.zeta, 1 / 3)

    def test_invalid(self):
        for kwargs in ({'times': (1.0, 0.5)}, {'times': (0.0, 1.0)}, {'times': (-1.0, 2.0)},
                       {'lambda_sign': 2}, {'eps': 0.0}, {'rho': 1.0}, {'times': ()}):
            data = {'rho': 5, 'eps': 0.1, 'times': (0.5, 1.0), **kwargs}
            with self.assertRaises(ValidationError):
                SolverParams(**data)

    def test_backward_times(self):
        params = SolverParams(rho=5, eps=0.1, times=(-0.5, -1.0))
        self.assertEqual(params.times, (-0.5, -1.0))


class DuhamelTestCase(TestCase):

    def setUp(self):
        self.grid = Grid.from_extent(20.0, 2001)
        self.params = SolverParams(rho=5, eps=0.1, times=geometric_times(n=4), s_quad_points=8)
        self.u0 = gaussian(self.grid, center=-3.0, amplitude=0.3)

    def test_zero(self):
        zero = GridFunction.zeros(self.grid)
        traj = linear_trajectory(zero, self.params)
        result = duhamel_nonlinear(traj, self.params)
        for state in result.states:
            self.assertEqual(state.sup_norm(), 0.0)

    def test_homogeneity(self):
        traj = linear_trajectory(self.u0, self.params)
        c = 0.7 - 0.4j
        scaled = linear_trajectory(self.u0 * c, self.params)
        first = duhamel_nonlinear(traj, self.params)
        second = duhamel_nonlinear(scaled, self.params)
        ratio = weighted_norm(second.states, self.params.times, 5) / weighted_norm(
            first.states, self.params.times, 5)
        self.assertAlmostEqual(ratio, abs(c) ** 5, delta=1e-8)

    def test_sign_flip(self):
        traj = linear_trajectory(self.u0, self.params)
        plus = duhamel_nonlinear(traj, self.params)
        minus = duhamel_nonlinear(traj, replace(self.params, lambda_sign=-1))
        for a, b in zip(plus.states, minus.states):
            np.testing.assert_allclose(a.values, -b.values, atol=1e-15)

    def test_time_reversal_symmetry(self):
        # v(t) = conj(u(-t)) has the Duhamel term conj(N(u)(t))
        traj = linear_trajectory(self.u0, self.params)
        backward = replace(self.params, times=tuple(-t for t in self.params.times))
        reversed_traj = Trajectory(backward.times, tuple(state.conj() for state in traj.states),
                                   initial=self.u0.conj())
        forward = duhamel_nonlinear(traj, self.params)
        result = duhamel_nonlinear(reversed_traj, backward)
        for a, b in zip(forward.states, result.states):
            self.assertLess(np.max(np.abs(np.conj(a.values) - b.values)), 1e-6)

    def test_short_time(self):
        t = 0.01
        params = replace(self.params, times=(t / 2, t))
        traj = linear_trajectory(self.u0, params)
        result = duhamel_nonlinear(traj, params).states[-1]
        scale = t * nonlinearity(self.u0, 5).sup_norm()
        self.assertGreater(result.sup_norm() / scale, 0.5)
        self.assertLess(result.sup_norm() / scale, 2.0)

    def test_times_must_match(self):
        traj = linear_trajectory(self.u0, self.params)
        with self.assertRaises(ValidationError):
            duhamel_nonlinear(traj, replace(self.params, times=(0.1, 0.2)))
        with self.assertRaises(ValidationError):
            duhamel_nonlinear(traj, replace(self.params, sigma=-1.0))

    def test_interpolation(self):
        traj = linear_trajectory(self.u0, self.params)
        np.testing.assert_array_equal(traj.state_at(0.0).values, self.u0.values)
        np.testing.assert_array_equal(traj.state_at(self.params.times[2]).values,
                                      traj.states[2].values)
        with self.assertRaises(ValidationError):
            traj.state_at(10.0)


class PicardTestCase(TestCase):

    def setUp(self):
        self.grid = Grid.from_extent(20.0, 2001)
        self.u0 = gaussian(self.grid, center=-3.0)
        self.params = SolverParams(rho=5, eps=0.1, times=geometric_times(), sigma=1.0)

    def test_linear_run(self):
        params = replace(self.params, lambda_sign=0)
        traj = picard_solve(self.u0, params)
        self.assertEqual(traj.iterations, 1)
        for t, state in zip(params.times, traj.states):
            np.testing.assert_array_equal(state.values, delta_propagate(self.u0, 1.0, t).values)

    def test_zero_data(self):
        traj = picard_solve(GridFunction.zeros(self.grid), self.params)
        for state in traj.states:
            self.assertEqual(state.sup_norm(), 0.0)

    def test_contraction(self):
        u0, eps = scale_to_budget(self.u0, self.params, 0.5)
        params = replace(self.params, eps=eps)
        constant, contractive = contraction_budget(params)
        self.assertTrue(contractive)
        self.assertAlmostEqual(2 ** 5 * eps ** 4 * constant, 0.5, delta=1e-9)

        traj = picard_solve(u0, params)
        self.assertNotIn('uncontrolled', traj.flags)
        self.assertNotIn('unconverged', traj.flags)
        self.assertTrue(np.all(traj.ratios <= 0.6))
        self.assertLessEqual(trajectory_norm(traj, params), 2 * eps)
        self.assertLess(picard_residual(traj, u0, params), 2 * params.tol)

    def test_data_exceeds_eps(self):
        params = replace(self.params, eps=1e-3, max_iters=2)
        traj = picard_solve(self.u0 * 0.01, params)
        self.assertIn('data_exceeds_eps', traj.flags)

    def test_divergence(self):
        params = replace(self.params, eps=50.0, max_iters=30)
        with self.assertRaisesRegex(NumericalFailure, 'contraction failed') as caught:
            picard_solve(self.u0 * 1.5, params)
        self.assertIn('distances', caught.exception.diagnostics)

    def test_negative_sigma(self):
        with self.assertRaises(ValidationError):
            picard_solve(self.u0, replace(self.params, sigma=-1.0))


class DiagnosticsTestCase(TestCase):

    def test_asymptotic_identical_data(self):
        grid = Grid.from_extent(20.0, 2001)
        params = SolverParams(rho=5, eps=0.1, times=geometric_times(n=4), s_quad_points=8)
        u0 = gaussian(grid, center=-3.0, amplitude=0.2)
        traj = picard_solve(u0, params)
        curves = asymptotic_diag(traj, traj, u0, u0, params)
        np.testing.assert_array_equal(curves.values, 0.0)
        np.testing.assert_array_equal(curves.reference, 0.0)

    def test_asymptotic_linear(self):
        grid = Grid.from_extent(20.0, 2001)
        params = SolverParams(rho=5, eps=0.1, times=geometric_times(n=4), lambda_sign=0)
        u0 = gaussian(grid, center=-3.0)
        v0 = u0 + gaussian(grid, center=1.0, width=0.3, amplitude=0.1)
        curves = asymptotic_diag(picard_solve(u0, params), picard_solve(v0, params),
                                 u0, v0, params)
        np.testing.assert_allclose(curves.values, curves.reference, atol=1e-12)

    def test_orbit_on_bound_state(self):
        sigma = -0.5
        grid = Grid.from_extent(80.0, 32001)
        psi = GridFunction.from_callable(grid, bound_states(Delta(sigma))[0])
        curves = orbit_manifold_diag(psi, sigma, [0.5, 1.0])
        self.assertAlmostEqual(abs(curves.projection), 1.0, delta=1e-4)
        self.assertTrue(np.all(curves.values < 1e-6))

    def test_orbit_orthogonal_data(self):
        sigma = -1.0
        grid = Grid.from_extent(20.0, 2001)
        # odd data has no component along the even bound state
        f = GridFunction.from_callable(grid, lambda x: x * np.exp(-x ** 2))
        times = [1.0, 2.0, 4.0]
        curves = orbit_manifold_diag(f, sigma, times, pad_to=40.0)
        self.assertAlmostEqual(abs(curves.projection), 0.0, delta=1e-12)
        padded = extend(f, 40.0)
        plain = [delta_propagate(padded, sigma, t).sup_norm() for t in times]
        np.testing.assert_allclose(curves.values, plain, rtol=1e-9)
        self.assertTrue(np.all(np.diff(curves.values) < 0))

    def test_orbit_decay(self):
        sigma = -1.0
        grid = Grid.from_extent(20.0, 2001)
        psi = GridFunction.from_callable(grid, bound_states(Delta(sigma))[0])
        u0 = psi + gaussian(grid, center=-3.0)
        curves = orbit_manifold_diag(u0, sigma, np.geomspace(1, 16, 5), p=1.0)
        self.assertEqual(curves.expected_slope, -0.5)
        self.assertAlmostEqual(curves.fitted_slope, -0.5, delta=0.05)

    def test_orbit_needs_attractive(self):
        grid = Grid.from_extent(20.0, 201)
        with self.assertRaises(ValidationError):
            orbit_manifold_diag(gaussian(grid), 1.0, [1.0, 2.0])
