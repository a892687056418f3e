from unittest import TestCase

import numpy as np
from django.core.exceptions import ValidationError
from django.test import override_settings
from faker import Faker

from grid.exceptions import NumericalFailure
from wiener.models import AtomicMeasure, CoeffTrajectory, FourierCoeffs
from wiener.operations import (atoms_from_density, conjugate_power, convolution_power,
                               galerkin_reference, l1_convolve, lipschitz_bound,
                               measure_convolve, measure_group, nonperiodic_picard_solve,
                               periodic_group, periodic_picard_solve, reconstruct, smallness)
from wiener.serializers import PeriodicEvolveConfigSerializer, TriplesField

Faker.seed(11)
fake = Faker()


def random_coeffs(low=-4, high=4, scale=1.0) -> FourierCoeffs:
    offset = fake.random.randint(low, high)
    size = fake.random.randint(1, 6)
    values = [complex(fake.random.uniform(-scale, scale), fake.random.uniform(-scale, scale))
              for _ in range(size)]
    return FourierCoeffs(offset, values)


def random_measure(size=5) -> AtomicMeasure:
    return AtomicMeasure.from_pairs(
        (fake.random.uniform(-3, 3), complex(fake.random.gauss(0, 1), fake.random.gauss(0, 1)))
        for _ in range(size))


class FourierCoeffsTestCase(TestCase):

    def test_from_dict(self):
        f = FourierCoeffs.from_dict({-1: 2.0, 2: 1j})
        self.assertEqual(f.offset, -1)
        self.assertEqual(f[2], 1j)
        self.assertEqual(f[0], 0j)
        self.assertEqual(f[7], 0j)
        self.assertEqual(f.as_dict(), {-1: 2.0, 2: 1j})
        self.assertEqual(f.l1_norm(), 3.0)

    def test_arithmetic(self):
        f = FourierCoeffs.unit(-2, 1.0) + FourierCoeffs.unit(3, 2.0)
        self.assertEqual(f.as_dict(), {-2: 1.0, 3: 2.0})
        self.assertEqual((f - f).l1_norm(), 0.0)
        self.assertEqual((2 * f)[3], 4.0)

    def test_reflect_conjugate(self):
        f = FourierCoeffs.from_dict({1: 1 + 1j, 3: 2.0})
        self.assertEqual(f.reflect_conjugate().as_dict(), {-3: 2.0, -1: 1 - 1j})

    def test_trim(self):
        f = FourierCoeffs(-2, [1e-20, 1.0, 0.0, 2.0, 1e-16])
        trimmed = f.trim()
        self.assertEqual(trimmed.offset, -1)
        self.assertEqual(trimmed.values.shape, (3,))

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            FourierCoeffs(0, [np.nan])
        with self.assertRaises(ValidationError):
            FourierCoeffs(0, [1.0], dim=2)


class ConvolutionTestCase(TestCase):

    def test_identity(self):
        f = random_coeffs()
        result = l1_convolve(f, FourierCoeffs.unit(0))
        self.assertAlmostEqual((result - f).l1_norm(), 0.0, places=14)

    def test_translation(self):
        result = l1_convolve(FourierCoeffs.unit(1), FourierCoeffs.unit(2)).trim()
        self.assertEqual(result.offset, 3)
        self.assertAlmostEqual(result[3], 1.0, places=14)

    def test_young(self):
        for _ in range(200):
            f, g = random_coeffs(), random_coeffs()
            self.assertLessEqual(l1_convolve(f, g).l1_norm(),
                                 f.l1_norm() * g.l1_norm() + 1e-12)

    def test_power_one(self):
        f = random_coeffs()
        self.assertEqual(convolution_power(f, 1).as_dict(), f.as_dict())

    def test_power_of_unit_mode(self):
        result = convolution_power(FourierCoeffs.unit(1), 3).trim()
        self.assertEqual(result.offset, 3)
        self.assertAlmostEqual(result[3], 1.0, places=14)

    def test_binomial(self):
        a, b = 0.7 - 0.2j, 1.3 + 0.5j
        result = convolution_power(FourierCoeffs(0, [a, b]), 2)
        for mode, expected in ((0, a ** 2), (1, 2 * a * b), (2, b ** 2)):
            self.assertAlmostEqual(result[mode], expected, places=13)

    def test_power_needs_positive_rho(self):
        with self.assertRaises(ValidationError):
            convolution_power(FourierCoeffs.unit(0), 0)


class ConjugatePowerTestCase(TestCase):

    def test_real_even_data(self):
        # real symmetric coefficients give a real function, so |u|^2 u = u^3
        f = FourierCoeffs.from_dict({-2: 0.3, -1: -0.5, 0: 1.2, 1: -0.5, 2: 0.3})
        difference = conjugate_power(f, 3) - convolution_power(f, 3)
        self.assertLess(difference.l1_norm(), 1e-13)

    def test_unimodular_mode(self):
        result = conjugate_power(FourierCoeffs.unit(1), 3).trim()
        self.assertEqual(result.offset, 1)
        self.assertAlmostEqual(result[1], 1.0, places=14)

    def test_norm_bound(self):
        for _ in range(50):
            f = random_coeffs()
            for rho in (3, 5):
                self.assertLessEqual(conjugate_power(f, rho).l1_norm(),
                                     f.l1_norm() ** rho * (1 + 1e-12))

    def test_even_rho(self):
        with self.assertRaisesRegex(ValidationError, 'conjugate power requires odd ρ'):
            conjugate_power(FourierCoeffs.unit(1), 2)


class TelescopingTestCase(TestCase):

    def test_difference_of_powers(self):
        for _ in range(100):
            rho = fake.random.randint(2, 4)
            u, v = random_coeffs(scale=0.5), random_coeffs(scale=0.5)
            left = (convolution_power(u, rho) - convolution_power(v, rho)).l1_norm()
            right = rho * (u - v).l1_norm() * (u.l1_norm() ** (rho - 1)
                                              + v.l1_norm() ** (rho - 1))
            self.assertLessEqual(left, right + 1e-12)


class PeriodicGroupTestCase(TestCase):

    def test_time_zero(self):
        f = random_coeffs()
        np.testing.assert_array_equal(periodic_group(f, 0.0).values, f.values)

    def test_norm_preserved(self):
        f = random_coeffs()
        self.assertAlmostEqual(periodic_group(f, fake.random.uniform(-3, 3)).l1_norm(),
                               f.l1_norm(), places=13)

    def test_single_mode_phase(self):
        result = periodic_group(FourierCoeffs.unit(1), 1 / (4 * np.pi))
        self.assertAlmostEqual(result[1], -1.0, places=14)


class AtomicMeasureTestCase(TestCase):

    def test_merge(self):
        measure = AtomicMeasure([1.0, 1.0 + 1e-13, 2.0], [1.0, 1.0, 3.0])
        self.assertEqual(measure.size, 2)
        self.assertEqual(measure[1.0], 2.0)
        self.assertEqual(measure.total_variation(), 5.0)

    def test_identity(self):
        mu = random_measure()
        result = measure_convolve(mu, AtomicMeasure.dirac(0.0))
        np.testing.assert_allclose(result.locations, mu.locations)
        np.testing.assert_allclose(result.weights, mu.weights)

    def test_translation(self):
        result = measure_convolve(AtomicMeasure([1.0, 2.0], [1.0, 1.0]), AtomicMeasure.dirac(3.0))
        np.testing.assert_array_equal(result.locations, [4.0, 5.0])
        np.testing.assert_array_equal(result.weights, [1.0, 1.0])

    def test_young(self):
        for _ in range(200):
            mu, nu = random_measure(), random_measure()
            self.assertLessEqual(measure_convolve(mu, nu).total_variation(),
                                 mu.total_variation() * nu.total_variation() + 1e-12)

    def test_lattice_embedding(self):
        f = FourierCoeffs.from_dict({-1: 0.5, 2: 1j})
        g = FourierCoeffs.from_dict({0: 1.0, 1: -2.0})
        periodic = l1_convolve(f, g)
        atomic = measure_convolve(AtomicMeasure.from_coeffs(f), AtomicMeasure.from_coeffs(g))
        for mode in periodic.modes:
            self.assertAlmostEqual(atomic[float(mode)], periodic[int(mode)], places=13)


class SmallnessTestCase(TestCase):

    def test_values(self):
        u0 = FourierCoeffs.unit(1, 0.05)
        mu = FourierCoeffs.unit(0, 0.1)
        q, contractive = smallness(u0, mu, 2, 0.5)
        self.assertAlmostEqual(q, 0.5 * (2 * 0.1 + 4 * 0.05 * 2))
        self.assertTrue(contractive)
        q, contractive = smallness(u0 * 100, mu, 2, 0.5)
        self.assertFalse(contractive)

    def test_backward_time(self):
        u0 = FourierCoeffs.unit(1, 0.05)
        self.assertEqual(smallness(u0, None, 3, -0.5), smallness(u0, None, 3, 0.5))

    def test_lipschitz_bound(self):
        u0 = FourierCoeffs.unit(1, 0.05)
        self.assertAlmostEqual(lipschitz_bound(u0, u0, None, 2, 0.5), 1 / (1 - 0.5 * 0.4))
        self.assertEqual(lipschitz_bound(u0 * 100, u0, None, 2, 0.5), float('inf'))


class PeriodicSolverTestCase(TestCase):

    def setUp(self):
        self.u0 = FourierCoeffs.unit(1, 0.05)
        self.mu = FourierCoeffs.unit(0, 0.1)

    def test_free_linear(self):
        u0 = FourierCoeffs.from_dict({-2: 0.1, 1: 0.3j})
        traj = periodic_picard_solve(u0, None, lambda_sign=0, T=0.7, n_times=4)
        self.assertIsInstance(traj, CoeffTrajectory)
        self.assertEqual(traj.iterations, 1)
        self.assertEqual(traj.distances, (0.0,))
        for t, state in zip(traj.times, traj.states):
            self.assertLess((state - periodic_group(u0, t)).l1_norm(), 1e-12)

    def test_constant_potential(self):
        c = 0.3
        u0 = FourierCoeffs.from_dict({-1: 0.2, 0: 0.1j, 2: 0.05})
        traj = periodic_picard_solve(u0, FourierCoeffs.unit(0, c), lambda_sign=0, T=0.4,
                                     n_times=8)
        for t, state in zip(traj.times, traj.states):
            expected = np.exp(1j * c * t) * periodic_group(u0, t)
            self.assertLess((state - expected).l1_norm(), 1e-8)

    def test_galerkin_reference(self):
        traj = periodic_picard_solve(self.u0, self.mu, rho=2, T=0.5)
        self.assertNotIn('uncontrolled', traj.flags)
        self.assertNotIn('unconverged', traj.flags)
        self.assertLessEqual(traj.sup_norm(), 2 * 0.05)
        reference = galerkin_reference(self.u0, self.mu, rho=2, T=0.5, modes=16)
        self.assertLess((traj.final - reference).l1_norm(), 1e-5)

    def test_backward_time(self):
        traj = periodic_picard_solve(self.u0, self.mu, rho=2, T=-0.5)
        self.assertEqual(traj.times[-1], -0.5)
        reference = galerkin_reference(self.u0, self.mu, rho=2, T=-0.5, modes=16)
        self.assertLess((traj.final - reference).l1_norm(), 1e-5)

    def test_conjugate_single_mode(self):
        # |u|^2 u keeps a single mode and only shifts its frequency
        a = 0.2
        T = 0.3
        traj = periodic_picard_solve(FourierCoeffs.unit(1, a), None, rho=3, T=T, n_times=8,
                                     conjugate=True)
        expected = a * np.exp(-1j * (4 * np.pi ** 2 + a ** 2) * T)
        self.assertAlmostEqual(traj.final[1], expected, places=10)
        self.assertEqual(traj.final.as_dict().keys(), {1})

    def test_conjugate_needs_odd_rho(self):
        with self.assertRaisesRegex(ValidationError, 'conjugate power requires odd ρ'):
            periodic_picard_solve(self.u0, None, rho=2, conjugate=True)

    def test_lipschitz_dependence(self):
        for _ in range(5):
            mode = fake.random.randint(-2, 2)
            shift = complex(fake.random.uniform(-5e-3, 5e-3), fake.random.uniform(-5e-3, 5e-3))
            v0 = self.u0 + FourierCoeffs.unit(mode, shift)
            u = periodic_picard_solve(self.u0, self.mu, rho=2, T=0.5, n_times=8)
            v = periodic_picard_solve(v0, self.mu, rho=2, T=0.5, n_times=8)
            bound = lipschitz_bound(self.u0, v0, self.mu, 2, 0.5)
            self.assertLessEqual(u.sup_distance(v), bound * (self.u0 - v0).l1_norm() * (1 + 1e-9))

    def test_rho_one_flagged(self):
        traj = periodic_picard_solve(self.u0, None, rho=1, T=0.1, n_times=2)
        self.assertIn('rho_one', traj.flags)
        # u_t = -4 pi^2 i m^2 u - i u
        expected = 0.05 * np.exp(-1j * (4 * np.pi ** 2 + 1) * 0.1)
        self.assertAlmostEqual(traj.final[1], expected, places=12)

    def test_contraction_failure(self):
        with self.assertRaisesRegex(NumericalFailure, 'contraction failed') as caught:
            periodic_picard_solve(FourierCoeffs.unit(0, 50.0), None, rho=3, T=0.5, n_times=2)
        self.assertIn('distances', caught.exception.diagnostics)

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            periodic_picard_solve(self.u0, None, T=0.0)
        with self.assertRaises(ValidationError):
            periodic_picard_solve(self.u0, None, lambda_sign=2)
        with self.assertRaises(ValidationError):
            periodic_picard_solve(AtomicMeasure.dirac(1.0), None)


class NonperiodicSolverTestCase(TestCase):

    def test_pure_phase(self):
        u0 = AtomicMeasure([-0.5, 0.3, 2.2], [0.1, 0.2j, -0.05])
        traj = nonperiodic_picard_solve(u0, None, lambda_sign=0, T=0.6, n_times=4)
        self.assertEqual(traj.iterations, 1)
        for t, state in zip(traj.times, traj.states):
            self.assertLess((state - measure_group(u0, t)).total_variation(), 1e-12)

    def test_zero_frequency(self):
        u0 = AtomicMeasure.dirac(0.0, 0.4)
        traj = nonperiodic_picard_solve(u0, None, lambda_sign=0, T=1.0, n_times=2)
        for state in traj.states:
            self.assertEqual(state[0.0], 0.4)

    def test_matches_periodic(self):
        u0 = AtomicMeasure([-1.0, 1.0], [0.05, 0.05])
        mu = AtomicMeasure.dirac(0.0, 0.1)
        atomic = nonperiodic_picard_solve(u0, mu, rho=2, T=0.3, n_times=16)
        periodic = periodic_picard_solve(FourierCoeffs.from_dict({-1: 0.05, 1: 0.05}),
                                         FourierCoeffs.unit(0, 0.1), rho=2, T=0.3, n_times=16)
        for lattice, measure in zip(periodic.states, atomic.states):
            for mode in lattice.modes:
                self.assertAlmostEqual(measure[float(mode)], lattice[int(mode)], delta=1e-8)

    def test_support_explosion(self):
        u0 = AtomicMeasure([1.0, np.sqrt(2.0), np.pi], [0.01, 0.01, 0.01])
        with override_settings(WIENER_ATOM_CAP=5):
            with self.assertRaisesRegex(NumericalFailure, 'support explosion') as caught:
                nonperiodic_picard_solve(u0, None, rho=3, T=0.1, n_times=1)
        self.assertGreater(caught.exception.diagnostics['atoms'], 5)

    def test_riemann_lebesgue(self):
        density = atoms_from_density(lambda xi: 0.2 * np.exp(-np.pi * xi ** 2), 3.0, 121)
        traj = nonperiodic_picard_solve(density, None, rho=2, T=0.05, n_times=1)
        self.assertNotIn('uncontrolled', traj.flags)
        x = np.linspace(-8.0, 8.0, 1601)
        values = np.abs(reconstruct(traj.final, x))
        tails = [values[np.abs(x) >= X].max() for X in (1.0, 2.0, 4.0)]
        self.assertTrue(np.all(np.diff(tails) < 0))
        self.assertLess(tails[-1], 1e-6 * values.max())

    def test_reconstruct_lattice(self):
        f = FourierCoeffs.from_dict({-1: 0.5, 1: 0.5})
        x = np.linspace(0, 1, 11)
        np.testing.assert_allclose(reconstruct(AtomicMeasure.from_coeffs(f), x),
                                   np.cos(2 * np.pi * x), atol=1e-14)


class PeriodicEvolveConfigTestCase(TestCase):

    def test_defaults(self):
        serializer = PeriodicEvolveConfigSerializer(data={'command': 'periodic_evolve'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        u0, mu = serializer.build_data()
        self.assertEqual(u0.as_dict(), {1: 0.05})
        self.assertEqual(mu.as_dict(), {0: 0.1})

    def test_round_trip(self):
        data = {'command': 'periodic_evolve', 'domain': 'atomic', 'rho': 3,
                'u0': [[0.5, 0.1, -0.2]], 'mu': [], 'T': -0.25, 'conjugate': True}
        first = PeriodicEvolveConfigSerializer(data=data)
        self.assertTrue(first.is_valid(), first.errors)
        second = PeriodicEvolveConfigSerializer(data=dict(first.validated_data))
        self.assertTrue(second.is_valid(), second.errors)
        self.assertEqual(dict(first.validated_data), dict(second.validated_data))
        u0, mu = second.build_data()
        self.assertEqual(u0[0.5], 0.1 - 0.2j)
        self.assertIsNone(mu)

    def test_rejects_even_conjugate(self):
        serializer = PeriodicEvolveConfigSerializer(
            data={'command': 'periodic_evolve', 'conjugate': True, 'rho': 2})
        self.assertFalse(serializer.is_valid())

    def test_rejects_fractional_mode(self):
        serializer = PeriodicEvolveConfigSerializer(
            data={'command': 'periodic_evolve', 'u0': [[0.5, 1.0, 0.0]]})
        self.assertFalse(serializer.is_valid())

    def test_dump(self):
        self.assertEqual(TriplesField.dump(FourierCoeffs.unit(2, 1 - 1j)), [[2, 1.0, -1.0]])
