from unittest import TestCase

import numpy as np
from django.core.exceptions import ValidationError
from faker import Faker

from grid.models import Grid, GridFunction, gaussian
from grid.operations import l1_norm, l2_norm
from lorentz.operations import (bound_state_lorentz_norm, decreasing_rearrangement,
                                holder_constant, lorentz_norm, weak_lp_norm)

Faker.seed(5)
fake = Faker()


def bound_state(grid, sigma):
    return GridFunction.from_callable(
        grid, lambda x: np.sqrt(-sigma / 2) * np.exp(sigma * np.abs(x) / 2))


class RearrangementTestCase(TestCase):

    def test_indicator(self):
        grid = Grid(-2.0, 2.0, 401)
        f = GridFunction.from_callable(
            grid, lambda x: ((x >= 0) & (x < 1)).astype(float))
        profile = decreasing_rearrangement(f)
        np.testing.assert_array_equal(profile.fstar_at([0.25, 0.5, 0.99]), 1.0)
        np.testing.assert_array_equal(profile.fstar_at([1.01, 2.0, 3.5]), 0.0)

    def test_constant_on_set(self):
        grid = Grid(0.0, 10.0, 1001)
        c = fake.random.uniform(0.5, 3.0)
        f = GridFunction.from_callable(grid, lambda x: np.where(x < 2.5, c, 0.0))
        profile = decreasing_rearrangement(f)
        np.testing.assert_allclose(profile.fstar_at(np.linspace(0.01, 2.49, 20)), c)

    def test_bound_state_profile(self):
        # |x| takes every value twice, so f* is a staircase with steps of 2h and
        # lags exp(-t / 2) by about h / 2; 1e-3 needs h <= 1e-3 (6001 nodes miss it)
        grid = Grid.from_extent(30.0, 60001)
        profile = decreasing_rearrangement(bound_state(grid, -2.0))
        t = np.linspace(0.01, 20.0, 500)
        self.assertLess(np.max(np.abs(profile.fstar_at(t) - np.exp(-t / 2))), 1e-3)

    def test_monotone_and_equimeasurable(self):
        grid = Grid.from_extent(10.0, 2001)
        f = gaussian(grid, center=fake.random.uniform(-2, 2)) \
            + gaussian(grid, center=3.0, width=0.5, amplitude=-2j)
        profile = decreasing_rearrangement(f)
        self.assertTrue(np.all(np.diff(profile.fstar) <= 0))
        self.assertTrue(np.all(profile.fstarstar >= profile.fstar - 1e-15))
        self.assertAlmostEqual(np.sum(profile.fstar) * grid.h, l1_norm(f), delta=1e-10)


class WeakNormTestCase(TestCase):

    def test_indicator(self):
        grid = Grid(-2.0, 2.0, 4001)
        f = GridFunction.from_callable(
            grid, lambda x: ((x >= 0) & (x < 1)).astype(float))
        for p in (1.5, 2.0, 4.0):
            self.assertAlmostEqual(weak_lp_norm(f, p), 1.0, delta=2e-3)

    def test_zero_and_scaling(self):
        grid = Grid.from_extent(5.0, 501)
        self.assertEqual(weak_lp_norm(GridFunction.zeros(grid), 3.0), 0.0)
        f = gaussian(grid)
        c = complex(fake.random.uniform(-3, 3), fake.random.uniform(-3, 3))
        self.assertAlmostEqual(weak_lp_norm(f * c, 3.0),
                               abs(c) * weak_lp_norm(f, 3.0), delta=1e-12)

    def test_sup_at_cell_ends(self):
        grid = Grid.from_extent(3.0, 61)
        f = GridFunction(grid, [complex(fake.random.gauss(0, 1), fake.random.gauss(0, 1))
                                for _ in range(grid.n)])
        profile = decreasing_rearrangement(f)
        cells = np.concatenate([[0.0], profile.t_samples])
        dense = np.concatenate([np.linspace(left, right, 200)[1:]
                                for left, right in zip(cells[:-1], cells[1:])])
        masses = np.concatenate([[0.0], np.cumsum(profile.fstar) * profile.cell])
        mass = np.interp(dense, cells, masses)
        for p in (1.2, 2.0, 5.0):
            sampled = np.max(dense ** (1 / p) * mass / dense)
            self.assertAlmostEqual(weak_lp_norm(f, p), sampled, delta=1e-12)

    def test_invalid_exponent(self):
        grid = Grid.from_extent(5.0, 51)
        with self.assertRaises(ValidationError):
            weak_lp_norm(gaussian(grid), 1.0)

    def test_holder(self):
        grid = Grid.from_extent(8.0, 1601)
        for _ in range(10):
            q1 = fake.random.uniform(2.5, 6.0)
            q2 = fake.random.uniform(2.5, 6.0)
            r = 1 / (1 / q1 + 1 / q2)
            f = gaussian(grid, center=fake.random.uniform(-3, 3),
                         width=fake.random.uniform(0.3, 2.0))
            g = gaussian(grid, center=fake.random.uniform(-3, 3),
                         width=fake.random.uniform(0.3, 2.0))
            product = f.with_values(f.values * g.values)
            self.assertLessEqual(
                weak_lp_norm(product, r),
                holder_constant(r) * weak_lp_norm(f, q1) * weak_lp_norm(g, q2))


class LorentzNormTestCase(TestCase):

    def test_gamma_formula(self):
        grid = Grid.from_extent(40.0, 40001)
        f = bound_state(grid, -2.0)
        self.assertAlmostEqual(lorentz_norm(f, 2, 2), 1.0, delta=2e-3)
        self.assertAlmostEqual(lorentz_norm(f, 1, 1), 2.0, delta=5e-3)
        for p, q in ((1, 1), (2, 2), (3, 2)):
            self.assertAlmostEqual(lorentz_norm(f, p, q), bound_state_lorentz_norm(-2.0, p, q),
                                   delta=5e-3)

    def test_refinement(self):
        errors = []
        for n in (4001, 8001):
            f = bound_state(Grid.from_extent(40.0, n), -2.0)
            errors.append(abs(lorentz_norm(f, 3, 2) - bound_state_lorentz_norm(-2.0, 3, 2)))
        self.assertLess(errors[1], 0.75 * errors[0])

    def test_closed_form_values(self):
        self.assertAlmostEqual(bound_state_lorentz_norm(-2.0, 2, 2), 1.0, places=14)
        self.assertAlmostEqual(bound_state_lorentz_norm(-2.0, 1, 1), 2.0, places=14)
        with self.assertRaises(ValidationError):
            bound_state_lorentz_norm(1.0, 2, 2)

    def test_zero(self):
        grid = Grid.from_extent(5.0, 51)
        self.assertEqual(lorentz_norm(GridFunction.zeros(grid), 2, 2), 0.0)

    def test_l2_consistency(self):
        grid = Grid.from_extent(12.0, 2401)
        f = gaussian(grid, center=1.0, amplitude=1 - 1j)
        self.assertAlmostEqual(lorentz_norm(f, 2, 2), l2_norm(f), delta=1e-8)

    def test_invalid(self):
        grid = Grid.from_extent(5.0, 51)
        with self.assertRaises(ValidationError):
            lorentz_norm(gaussian(grid), 0, 2)
        with self.assertRaises(ValidationError):
            lorentz_norm(gaussian(grid), 2, -1)
