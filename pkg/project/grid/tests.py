import json
import os
import shutil
import tempfile
from io import StringIO
from unittest import TestCase, mock

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management import CommandError, call_command
from django.test import override_settings
from faker import Faker

from grid.management.base import EXIT_BAD_CONFIG, EXIT_IO, EXIT_NUMERICAL
from grid.management.commands import verify
from grid.models import Grid, GridFunction, gaussian
from grid.operations import (convolve, extend, halfline_split, inner, integrate,
                             l2_norm, one_sided_derivative, one_sided_limit,
                             reflect)

Faker.seed(28)
fake = Faker()


class GridClassTestCase(TestCase):

    def test_spacing(self):
        grid = Grid(0.0, 1.0, 101)
        self.assertAlmostEqual(grid.h, 0.01)
        self.assertTrue(grid.contains(0.5))
        self.assertFalse(grid.contains(0.505))

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            Grid(1.0, 0.0, 10)
        with self.assertRaises(ValidationError):
            Grid(0.0, 1.0, 1)

    def test_values_length_and_finiteness(self):
        grid = Grid(0.0, 1.0, 5)
        with self.assertRaises(ValidationError):
            GridFunction(grid, np.ones(4))
        with self.assertRaises(ValidationError):
            GridFunction(grid, [1, 2, np.nan, 4, 5])

    def test_symmetric(self):
        self.assertTrue(Grid.from_extent(3.0, 61).is_symmetric)
        self.assertFalse(Grid(-3.0, 4.0, 71).is_symmetric)


class IntegrateTestCase(TestCase):

    def test_constant(self):
        grid = Grid(0.0, 1.0, 101)
        self.assertEqual(integrate(GridFunction(grid, np.ones(101))), 1.0)

    def test_linear(self):
        grid = Grid(0.0, 1.0, 101)
        f = GridFunction.from_callable(grid, lambda x: x)
        self.assertAlmostEqual(integrate(f).real, 0.5, places=14)

    def test_gaussian(self):
        grid = Grid(-10.0, 10.0, 4001)
        f = gaussian(grid)
        self.assertAlmostEqual(integrate(f).real, np.sqrt(np.pi), delta=1e-8)

    def test_conjugation(self):
        grid = Grid.from_extent(5.0, 501)
        phase = fake.random.uniform(-3, 3)
        f = GridFunction.from_callable(
            grid, lambda x: np.exp(-x ** 2 + 1j * phase * x))
        self.assertAlmostEqual(integrate(f.conj()), np.conj(integrate(f)),
                               places=12)


class ConvolveTestCase(TestCase):
    grid = Grid.from_extent(4.0, 801)

    def test_discrete_identity(self):
        f = gaussian(self.grid, center=fake.random.uniform(-1, 1))
        delta = np.zeros(self.grid.n)
        delta[self.grid.index_of(0.0)] = 1.0 / self.grid.h
        result = convolve(f, GridFunction(self.grid, delta))
        np.testing.assert_allclose(result.values, f.values, atol=1e-12)

    def test_tent(self):
        box = GridFunction.from_callable(
            self.grid, lambda x: ((x >= 0) & (x <= 1)).astype(float))
        result = convolve(box, box)
        self.assertAlmostEqual(result.values[self.grid.index_of(1.0)].real,
                               1.0, delta=2 * self.grid.h)
        tent = np.clip(1 - np.abs(self.grid.x - 1), 0, None)
        self.assertLess(np.max(np.abs(result.values - tent)), 2 * self.grid.h)

    def test_commutative(self):
        f = gaussian(self.grid, center=-0.5)
        g = gaussian(self.grid, center=0.7, width=0.3)
        np.testing.assert_allclose(convolve(f, g).values,
                                   convolve(g, f).values, atol=1e-12)

    def test_scaling(self):
        f = gaussian(self.grid)
        g = gaussian(self.grid, width=2.0)
        c = complex(fake.random.uniform(-2, 2), fake.random.uniform(-2, 2))
        np.testing.assert_allclose(convolve(f * c, g).values,
                                   c * convolve(f, g).values, atol=1e-12)

    def test_incompatible(self):
        f = gaussian(self.grid)
        g = gaussian(Grid.from_extent(4.0, 401))
        with self.assertRaises(ValidationError):
            convolve(f, g)


class ReflectSplitTestCase(TestCase):
    grid = Grid.from_extent(6.0, 1201)

    def test_even_and_odd(self):
        even = gaussian(self.grid)
        odd = GridFunction.from_callable(self.grid, lambda x: x)
        np.testing.assert_allclose(reflect(even).values, even.values)
        np.testing.assert_allclose(reflect(odd).values, -odd.values, atol=1e-12)

    def test_involution(self):
        f = gaussian(self.grid, center=fake.random.uniform(-2, 2))
        np.testing.assert_array_equal(reflect(reflect(f)).values, f.values)

    def test_asymmetric(self):
        f = gaussian(Grid(-1.0, 2.0, 31))
        with self.assertRaises(ValidationError):
            reflect(f)
        with self.assertRaises(ValidationError):
            halfline_split(f)

    def test_left_supported(self):
        f = GridFunction.from_callable(
            self.grid, lambda x: np.where(x < 0, np.exp(-(x + 3) ** 2), 0))
        minus, plus = halfline_split(f)
        np.testing.assert_allclose(minus.values, f.values)
        np.testing.assert_allclose(plus.values, 0)

    def test_partition(self):
        ones = GridFunction(self.grid, np.ones(self.grid.n))
        minus, plus = halfline_split(ones)
        np.testing.assert_allclose((minus + reflect(plus)).values, 1, atol=1e-12)

    def test_reconstruction(self):
        for _ in range(5):
            center = fake.random.uniform(-3, 3)
            f = gaussian(self.grid, center=center, amplitude=1 + 2j)
            minus, plus = halfline_split(f)
            np.testing.assert_allclose((minus + reflect(plus)).values,
                                       f.values, atol=1e-12)

    def test_right_gaussian(self):
        f = gaussian(self.grid, center=2.0)
        minus, plus = halfline_split(f)
        self.assertLess(minus.sup_norm(), 2e-2)
        np.testing.assert_allclose(reflect(plus).values[self.grid.x > 0],
                                   f.values[self.grid.x > 0])


class NormsTestCase(TestCase):

    def test_inner_and_norm(self):
        grid = Grid.from_extent(10.0, 2001)
        f = gaussian(grid)
        self.assertAlmostEqual(inner(f, f).real, l2_norm(f) ** 2, places=12)
        self.assertAlmostEqual(l2_norm(f) ** 2, np.sqrt(np.pi / 2), places=8)

    def test_one_sided(self):
        grid = Grid.from_extent(1.0, 201)
        f = GridFunction.from_callable(grid, lambda x: np.where(x >= 0, x ** 2 + 2 * x, -x))
        self.assertAlmostEqual(one_sided_derivative(f, 0.0, 1).real, 2.0, places=8)
        self.assertAlmostEqual(one_sided_derivative(f, 0.0, -1).real, -1.0, places=8)

        jump = GridFunction.from_callable(grid, lambda x: np.where(x > 0, 1 + x, x))
        self.assertAlmostEqual(one_sided_limit(jump, 0.0, 1).real, 1.0, places=10)
        self.assertAlmostEqual(one_sided_limit(jump, 0.0, -1).real, 0.0, places=10)


class ExtendTestCase(TestCase):

    def test_zero_padding(self):
        grid = Grid.from_extent(5.0, 501)
        f = gaussian(grid, center=fake.random.uniform(-1, 1))
        padded = extend(f, 12.0)
        self.assertAlmostEqual(padded.grid.h, grid.h, places=12)
        self.assertAlmostEqual(padded.grid.x_max, 12.0, places=9)
        self.assertAlmostEqual(l2_norm(padded), l2_norm(f), places=12)
        inside = np.abs(padded.x) <= 5.0 + 1e-9
        np.testing.assert_array_equal(padded.values[inside], f.values)
        np.testing.assert_array_equal(padded.values[~inside], 0)

    def test_smaller_extent_is_noop(self):
        f = gaussian(Grid.from_extent(5.0, 501))
        self.assertIs(extend(f, 3.0), f)


def run_command(name, *args, **options) -> dict:
    out = StringIO()
    call_command(name, *args, stdout=out, **options)
    return json.loads(out.getvalue())


def exit_code(name, *args) -> int:
    with tempfile.TemporaryDirectory() as directory, override_settings(OUTPUT_DIR=directory):
        try:
            call_command(name, *args, stdout=StringIO())
        except CommandError as exc:
            return exc.returncode
    return 0


def read_bytes(path) -> bytes:
    with open(path, 'rb') as file:
        return file.read()


def write_config(directory, data) -> str:
    path = os.path.join(directory, 'config.json')
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(data, file)
    return path


class ConfigCommandTestCase(TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.directory)

    def test_bad_config(self):
        bad = write_config(self.directory, {'interaction': {'kind': 'delta', 'sigma': 'abc'}})
        self.assertEqual(exit_code('spectrum', '--config', bad), EXIT_BAD_CONFIG)
        self.assertEqual(exit_code('spectrum', '--two-delta', '-1'), EXIT_BAD_CONFIG)
        self.assertEqual(exit_code('spectrum'), EXIT_BAD_CONFIG)

        broken = os.path.join(self.directory, 'broken.json')
        with open(broken, 'w', encoding='utf-8') as file:
            file.write('{"interaction": ')
        self.assertEqual(exit_code('spectrum', '--config', broken), EXIT_BAD_CONFIG)

    def test_missing_config_file(self):
        missing = os.path.join(self.directory, 'missing.json')
        self.assertEqual(exit_code('spectrum', '--config', missing), EXIT_IO)

    def test_numerical_failure(self):
        config = write_config(self.directory, {'u0': [[0, 50.0, 0.0]], 'mu': [], 'rho': 3,
                                               'T': 0.5, 'n_times': 2})
        self.assertEqual(exit_code('periodic_evolve', '--config', config), EXIT_NUMERICAL)

    def test_failed_verdict(self):
        config = write_config(self.directory, {
            'interaction': {'kind': 'delta', 'sigma': 0.0},
            'initial': {'gaussians': [{'center': 0.0}]},
            'grid': {'x_max': 20.0, 'n': 2001},
            'times': [1.0, 2.0, 4.0],
            'expected_slope': -1.0,
            'slope_tolerance': 0.01,
        })
        self.assertEqual(exit_code('decay_scan', '--config', config), EXIT_NUMERICAL)

    def test_flags_override_file(self):
        config = write_config(self.directory, {'interaction': {'kind': 'delta', 'sigma': 1.0}})
        result = run_command('spectrum', '--config', config, '--delta', '-2')
        self.assertEqual(result['interaction'], {'kind': 'delta', 'sigma': -2.0})
        self.assertAlmostEqual(result['eigenvalues'][0], -1.0, places=14)

    def test_same_seed_same_artifacts(self):
        seed = str(fake.random.randint(0, 10 ** 6))
        contents = []
        for _ in range(2):
            with tempfile.TemporaryDirectory() as directory, \
                    override_settings(OUTPUT_DIR=directory):
                call_command('verify', '--only', 'scattering', '--instances', '200',
                             '--seed', seed, '--output', 'run', stdout=StringIO())
                contents.append([read_bytes(os.path.join(directory, name))
                                 for name in ('run.json', 'run.csv')])
        self.assertEqual(contents[0], contents[1])
        self.assertEqual(json.loads(contents[0][0])['config']['seed'], int(seed))


class VerifyCommandTestCase(TestCase):

    def test_passing_checks_exit_zero(self):
        result = run_command('verify', '--only', 'scattering', '--only', 'spectrum',
                             '--instances', '100')
        self.assertTrue(result['passed'])
        self.assertEqual(set(result['checks']), {'scattering', 'spectrum'})
        self.assertEqual(exit_code('verify', '--only', 'scattering', '--instances', '100'), 0)

    def test_any_failed_check_exits_numerical(self):
        failing = {**verify.CHECKS, 'spectrum': lambda fake, instances: {'passed': False}}
        with mock.patch.dict(verify.CHECKS, failing):
            code = exit_code('verify', '--only', 'scattering', '--only', 'spectrum',
                             '--instances', '100')
        self.assertEqual(code, EXIT_NUMERICAL)
