"""Fourier-side solvers for i u_t + Delta u + mu u = lambda u^rho.

In coefficients the equation reads
    u_t(xi) = -4 pi^2 i xi^2 u(xi) + i (mu * u)(xi) - i lambda (u *...* u)(xi),
products of functions being convolutions of coefficients. The Duhamel
integral is taken in the interaction picture v = e^(4 pi^2 i xi^2 t) u,
where the integrand is smooth, with composite Gauss-Legendre panels on
[0, T].
"""
import logging
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from numpy.polynomial.legendre import leggauss, legint, legvander
from scipy.integrate import solve_ivp
from scipy.signal import fftconvolve

from grid.exceptions import NumericalFailure
from wiener.models import AtomicMeasure, CoeffTrajectory, FourierCoeffs

logger = logging.getLogger(__name__)

FOUR_PI_SQUARED = 4.0 * np.pi ** 2


class _Lattice:
    """Integer modes kept as one contiguous window"""

    @staticmethod
    def convolve(la, va, lb, vb):
        values = fftconvolve(va, vb, axes=-1)
        offset = int(la[0] + lb[0])
        return np.arange(offset, offset + values.shape[-1]), values

    @staticmethod
    def union(la, lb):
        return np.arange(min(la[0], lb[0]), max(la[-1], lb[-1]) + 1)

    @staticmethod
    def keep(values, threshold):
        kept = np.flatnonzero(np.max(np.abs(values), axis=0) >= threshold)
        if kept.shape[0] == 0:
            return np.arange(1)
        return np.arange(kept[0], kept[-1] + 1)

    @staticmethod
    def state(locations, row) -> FourierCoeffs:
        return FourierCoeffs(int(locations[0]), row)


class _Atoms:
    """Real locations, merged after rounding"""

    @staticmethod
    def convolve(la, va, lb, vb):
        sums = np.round(np.add.outer(la, lb).ravel(), settings.WIENER_MERGE_DECIMALS)
        locations, inverse = np.unique(sums, return_inverse=True)
        products = va[:, :, None] * vb[:, None, :]
        products = products.reshape(products.shape[0], -1)
        values = np.zeros((products.shape[0], locations.shape[0]), dtype=complex)
        np.add.at(values.T, inverse.ravel(), products.T)
        return locations + 0.0, values

    @staticmethod
    def union(la, lb):
        return np.union1d(la, lb)

    @staticmethod
    def keep(values, threshold):
        kept = np.flatnonzero(np.max(np.abs(values), axis=0) >= threshold)
        return kept if kept.shape[0] else np.arange(1)

    @staticmethod
    def state(locations, row) -> AtomicMeasure:
        return AtomicMeasure(locations, row)


def _embed(target, locations, values):
    """Values on `target`, which contains every entry of `locations`"""
    embedded = np.zeros(values.shape[:-1] + (target.shape[0],), dtype=complex)
    embedded[..., np.searchsorted(target, locations)] = values
    return embedded


def _add(algebra, first, second):
    locations = algebra.union(first[0], second[0])
    return locations, (_embed(locations, *first) + _embed(locations, *second))


def _power(algebra, locations, values, rho, conjugate=False):
    if conjugate:
        half = (rho - 1) // 2
        mirrored = (-locations[::-1] + 0, np.conj(values[..., ::-1]))
        factors = [(locations, values)] * (half + 1) + [mirrored] * half
    else:
        factors = [(locations, values)] * rho
    result = factors[0]
    for factor in factors[1:]:
        result = algebra.convolve(*result, *factor)
    return result


def _require_power(rho) -> int:
    if int(rho) != rho or rho < 1:
        raise ValidationError('rho must be a positive integer')
    return int(rho)


def _require_odd(rho) -> int:
    rho = _require_power(rho)
    if rho < 3 or rho % 2 == 0:
        raise ValidationError('conjugate power requires odd ρ')
    return rho


def l1_convolve(f: FourierCoeffs, g: FourierCoeffs) -> FourierCoeffs:
    """(f * g)(m) = sum_k f(m - k) g(k)"""
    locations, values = _Lattice.convolve(f.modes, f.values, g.modes, g.values)
    return FourierCoeffs(int(locations[0]), values)


def convolution_power(f: FourierCoeffs, rho: int) -> FourierCoeffs:
    rho = _require_power(rho)
    locations, values = _power(_Lattice, f.modes, f.values, rho)
    return FourierCoeffs(int(locations[0]), values)


def conjugate_power(u: FourierCoeffs, rho: int) -> FourierCoeffs:
    """Coefficients of |u|^(rho - 1) u = (u conj(u))^((rho - 1) / 2) u"""
    rho = _require_odd(rho)
    locations, values = _power(_Lattice, u.modes, u.values, rho, conjugate=True)
    return FourierCoeffs(int(locations[0]), values)


def measure_convolve(mu: AtomicMeasure, nu: AtomicMeasure) -> AtomicMeasure:
    """Atoms at the pairwise sums of locations with product weights"""
    locations, values = _Atoms.convolve(mu.locations, mu.weights[None, :],
                                        nu.locations, nu.weights[None, :])
    return AtomicMeasure(locations, values[0])


def _phase(times, locations):
    times = np.atleast_1d(np.asarray(times, dtype=float))
    squares = np.asarray(locations, dtype=float) ** 2
    return np.exp(-1j * FOUR_PI_SQUARED * np.outer(times, squares))


def periodic_group(u: FourierCoeffs, t: float) -> FourierCoeffs:
    """S(t): mode m picks up e^(-4 pi^2 i m^2 t)"""
    return FourierCoeffs(u.offset, _phase(t, u.modes)[0] * u.values)


def measure_group(u: AtomicMeasure, t: float) -> AtomicMeasure:
    return AtomicMeasure(u.locations, _phase(t, u.locations)[0] * u.weights)


def smallness(u0, mu, rho: int, T: float, lambda_sign: int = 1) -> Tuple[float, bool]:
    """q = |T| (2 ||mu|| + 2^rho eps^(rho - 1) K) with eps = ||u0|| and K = rho.

    The fixed point map is a contraction on the ball of radius 2 eps when
    q < 1.
    """
    rho = _require_power(rho)
    eps = u0.norm()
    mu_norm = mu.norm() if mu is not None else 0.0
    q = abs(T) * (2 * mu_norm + abs(lambda_sign) * 2 ** rho * eps ** (rho - 1) * rho)
    return q, q < 1


def lipschitz_bound(u0, v0, mu, rho: int, T: float, lambda_sign: int = 1) -> float:
    """(1 - q)^-1 with q = |T| (||mu|| + 2^rho eps^(rho - 1) rho); bounds
    sup_t ||u - v|| / ||u0 - v0||, infinite when q >= 1"""
    rho = _require_power(rho)
    eps = max(u0.norm(), v0.norm())
    mu_norm = mu.norm() if mu is not None else 0.0
    q = abs(T) * (mu_norm + abs(lambda_sign) * 2 ** rho * eps ** (rho - 1) * rho)
    if q >= 1:
        return float('inf')
    return 1.0 / (1.0 - q)


@lru_cache(maxsize=None)
def _legendre_rule(order: int):
    """Gauss-Legendre nodes and weights on [-1, 1] plus the matrix taking
    samples at the nodes to integrals from -1 up to each node"""
    x, w = leggauss(order)
    vander = legvander(x, order - 1)
    to_coefficients = ((2 * np.arange(order) + 1) / 2)[:, None] * vander.T * w[None, :]
    cumulative = legvander(x, order) @ legint(np.eye(order), lbnd=-1, axis=0) @ to_coefficients
    for array in (x, w, cumulative):
        array.setflags(write=False)
    return x, w, cumulative


def _time_rule(T: float, panels: int, order: int):
    x, w, cumulative = _legendre_rule(order)
    edges = np.linspace(0.0, T, panels + 1)
    h = T / panels
    nodes = (edges[:-1, None] + h * (1 + x[None, :]) / 2).ravel()
    return edges, nodes, h, w, cumulative


class _Problem:
    """One Picard problem: data, potential and the time rule"""

    def __init__(self, algebra, u0, mu, rho, lambda_sign, T, panels, order, conjugate):
        self.algebra = algebra
        self.u0 = u0
        self.mu = mu
        self.rho = rho
        self.lambda_sign = lambda_sign
        self.conjugate = conjugate
        self.panels = panels
        self.order = order
        self.edges, self.nodes, self.h, self.weights, self.cumulative = _time_rule(
            T, panels, order)

    def linear(self, times):
        locations, values = self.u0
        return locations, _phase(times, locations) * values[None, :]

    def forcing(self, locations, values):
        """i mu * u - i lambda u^rho at the time nodes"""
        result = (locations, np.zeros_like(values))
        if self.mu is not None:
            mu_locations, mu_values = self.mu
            convolved = self.algebra.convolve(mu_locations, mu_values[None, :],
                                              locations, values)
            result = _add(self.algebra, result, (convolved[0], 1j * convolved[1]))
        if self.lambda_sign:
            power = _power(self.algebra, locations, values, self.rho, self.conjugate)
            result = _add(self.algebra, result,
                          (power[0], -1j * self.lambda_sign * power[1]))
        return result

    def duhamel(self, locations, values):
        """S(t) u0 + integral_0^t S(t - s) forcing(s) ds at the nodes and
        the panel ends"""
        f_locations, f_values = self.forcing(locations, values)
        integrand = np.conj(_phase(self.nodes, f_locations)) * f_values
        integrand = integrand.reshape(self.panels, self.order, -1)
        inside = self.h / 2 * np.einsum('jk,pkl->pjl', self.cumulative, integrand)
        totals = self.h / 2 * np.einsum('k,pkl->pl', self.weights, integrand)
        before = np.cumsum(totals, axis=0) - totals
        at_nodes = (before[:, None, :] + inside).reshape(-1, f_locations.shape[0])
        at_edges = np.concatenate([np.zeros((1, f_locations.shape[0])),
                                   np.cumsum(totals, axis=0)])

        target = self.algebra.union(self.u0[0], f_locations)
        start = _embed(target, self.u0[0], self.u0[1])
        nodes = _phase(self.nodes, target) * (start[None, :] + _embed(target, f_locations,
                                                                       at_nodes))
        edges = _phase(self.edges, target) * (start[None, :] + _embed(target, f_locations,
                                                                       at_edges))
        return target, nodes, edges


def _sup_l1(values) -> float:
    return float(np.max(np.sum(np.abs(values), axis=-1)))


def _sup_distance(algebra, first, second) -> float:
    locations, difference = _add(algebra, first, (second[0], -second[1]))
    return _sup_l1(difference)


def _picard(algebra, problem: _Problem, q: float, tol: float, max_iters: int,
            flags: set) -> CoeffTrajectory:
    current = problem.linear(problem.nodes)
    edges = problem.linear(problem.edges)
    history = [max(_sup_l1(current[1]), _sup_l1(edges[1]))]
    distances = []
    pruned = 0
    streak = 0
    for iteration in range(1, max_iters + 1):
        try:
            with np.errstate(over='raise', invalid='raise'):
                locations, at_nodes, at_edges = problem.duhamel(*current)
        except FloatingPointError as exc:
            raise NumericalFailure('contraction failed', {
                'distances': distances,
                'sup_norm_history': history,
                'overflow_at': iteration,
                'q': q,
            }) from exc

        kept = algebra.keep(np.concatenate([at_nodes, at_edges]), settings.WIENER_PRUNE)
        pruned += locations.shape[0] - kept.shape[0]
        locations = locations[kept]
        if locations.shape[0] > settings.WIENER_ATOM_CAP:
            raise NumericalFailure('support explosion', {
                'atoms': int(locations.shape[0]),
                'cap': settings.WIENER_ATOM_CAP,
                'iteration': iteration,
            })
        following = (locations, at_nodes[:, kept])
        edges = (locations, at_edges[:, kept])

        distance = _sup_distance(algebra, following, current)
        distances.append(distance)
        history.append(max(_sup_l1(following[1]), _sup_l1(edges[1])))
        logger.info('picard iteration %d: distance %.3e, sup norm %.6e, support %d',
                    iteration, distance, history[-1], locations.shape[0])
        current = following

        if len(distances) > 1 and distances[-2] > 0 and distance > distances[-2]:
            streak += 1
        else:
            streak = 0
        if streak >= settings.PICARD_DIVERGENCE_STREAK:
            raise NumericalFailure('contraction failed', {
                'distances': distances,
                'sup_norm_history': history,
                'q': q,
            })
        if distance < tol:
            break
    else:
        logger.warning('picard iteration stopped at the cap of %d', max_iters)
        flags.add('unconverged')

    if pruned:
        logger.info('%d coefficients below %.1e pruned', pruned, settings.WIENER_PRUNE)
        flags.add('pruned')
    states = tuple(algebra.state(edges[0], row) for row in edges[1])
    return CoeffTrajectory(tuple(float(t) for t in problem.edges), states, tuple(history),
                           tuple(distances), q, pruned, frozenset(flags))


def _arrays(coeffs):
    if isinstance(coeffs, FourierCoeffs):
        return coeffs.modes, coeffs.values
    return coeffs.locations, coeffs.weights


def _solve(algebra, kind, u0, mu, rho, lambda_sign, T, n_times, tol, max_iters, conjugate,
           order) -> CoeffTrajectory:
    if not isinstance(u0, kind) or not (mu is None or isinstance(mu, kind)):
        raise ValidationError(f"data and potential must be {kind.__name__}")
    rho = _require_power(rho)
    if conjugate:
        _require_odd(rho)
    if lambda_sign not in (-1, 0, 1):
        raise ValidationError('lambda_sign must be -1, 0 or 1')
    if T == 0:
        raise ValidationError('time horizon T must be nonzero')
    n_times = settings.WIENER_PANELS if n_times is None else n_times
    order = settings.WIENER_GAUSS_ORDER if order is None else order
    tol = settings.WIENER_TOL if tol is None else tol
    max_iters = settings.PICARD_MAX_ITERS if max_iters is None else max_iters
    if n_times < 1 or order < 1 or max_iters < 1 or tol <= 0:
        raise ValidationError('panels, quadrature order, iteration cap and tolerance '
                              'must be positive')

    flags = set()
    q, contractive = smallness(u0, mu, rho, T, lambda_sign)
    if not contractive:
        logger.warning('smallness q = %.3f >= 1: iteration is uncontrolled', q)
        flags.add('uncontrolled')
    if rho == 1 and lambda_sign:
        logger.warning('rho = 1 makes the nonlinearity linear')
        flags.add('rho_one')

    if mu is not None and mu.norm() == 0:
        mu = None
    problem = _Problem(algebra, _arrays(u0), None if mu is None else _arrays(mu), rho,
                       lambda_sign, float(T), n_times, order, conjugate)
    return _picard(algebra, problem, q, tol, max_iters, flags)


def periodic_picard_solve(u0: FourierCoeffs, mu: Optional[FourierCoeffs] = None,
                          rho: int = 2, lambda_sign: int = 1, T: float = 0.5,
                          n_times: Optional[int] = None, tol: Optional[float] = None,
                          max_iters: Optional[int] = None, conjugate: bool = False,
                          order: Optional[int] = None) -> CoeffTrajectory:
    """Mild solution on the torus on [0, T] (T < 0 runs backward).

    `n_times` Gauss-Legendre panels of `order` nodes each; states are
    reported at the panel ends. `conjugate` switches u^rho to
    |u|^(rho - 1) u.
    """
    return _solve(_Lattice, FourierCoeffs, u0, mu, rho, lambda_sign, T, n_times, tol,
                  max_iters, conjugate, order)


def nonperiodic_picard_solve(u0_hat: AtomicMeasure, mu_hat: Optional[AtomicMeasure] = None,
                             rho: int = 2, lambda_sign: int = 1, T: float = 0.5,
                             n_times: Optional[int] = None, tol: Optional[float] = None,
                             max_iters: Optional[int] = None, conjugate: bool = False,
                             order: Optional[int] = None) -> CoeffTrajectory:
    """Same iteration on the line for purely atomic transforms"""
    return _solve(_Atoms, AtomicMeasure, u0_hat, mu_hat, rho, lambda_sign, T, n_times, tol,
                  max_iters, conjugate, order)


def galerkin_reference(u0: FourierCoeffs, mu: Optional[FourierCoeffs] = None, rho: int = 2,
                       lambda_sign: int = 1, T: float = 0.5, modes: Optional[int] = None,
                       conjugate: bool = False) -> FourierCoeffs:
    """u(T) from the coefficient ODE truncated to |m| <= modes, integrated
    with an explicit Runge-Kutta method"""
    rho = _require_power(rho)
    if conjugate:
        _require_odd(rho)
    modes = settings.WIENER_GALERKIN_MODES if modes is None else modes
    window = np.arange(-modes, modes + 1)
    mu = FourierCoeffs.zero() if mu is None else mu
    start = u0.window(-modes, modes)

    def truncate(locations, values):
        return FourierCoeffs(int(locations[0]), values).window(-modes, modes)

    def rhs(_, y):
        result = -1j * FOUR_PI_SQUARED * window ** 2 * y
        result = result + 1j * truncate(*_Lattice.convolve(mu.modes, mu.values, window, y))
        if lambda_sign:
            power = _power(_Lattice, window, y, rho, conjugate)
            result = result - 1j * lambda_sign * truncate(*power)
        return result

    solution = solve_ivp(rhs, (0.0, T), start, method='DOP853', rtol=1e-12, atol=1e-15)
    if not solution.success:
        raise NumericalFailure('galerkin reference failed', {'message': solution.message})
    return FourierCoeffs(-modes, solution.y[:, -1])


def atoms_from_density(density: Callable, xi_max: float, n: int) -> AtomicMeasure:
    """Atoms h density(xi_j) on a uniform grid of [-xi_max, xi_max]"""
    if n < 2 or xi_max <= 0:
        raise ValidationError('density grid needs n >= 2 and xi_max > 0')
    locations = np.linspace(-xi_max, xi_max, n)
    h = locations[1] - locations[0]
    return AtomicMeasure(locations, h * np.asarray(density(locations), dtype=complex))


def reconstruct(measure: AtomicMeasure, x) -> np.ndarray:
    """u(x) = sum_j w_j e^(2 pi i x xi_j)"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.exp(2j * np.pi * np.outer(x, measure.locations)) @ measure.weights
