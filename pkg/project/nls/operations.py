"""Global mild solutions of i u_t + Delta_sigma u = lambda |u|^(rho-1) u in weak Lp.

The solution space carries the norm sup_t |t|^theta ||u(t)||_(rho+1, inf),
realised on the finite time grid of SolverParams. The Duhamel integral
has the weight (t - s)^(-zeta) s^(-theta rho), which Gauss-Jacobi nodes
absorb exactly.
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from scipy.special import roots_jacobi
from scipy.stats import linregress

from grid.exceptions import NumericalFailure
from grid.models import Grid, GridFunction, gaussian
from grid.operations import extend, inner, l1_norm
from lorentz.operations import weak_lp_norm
from nls.models import DecayCurves, SolverParams, Trajectory, weight_exponents
from propagator.models import PropagatorMethod
from propagator.operations import delta_propagate
from spectral.models import Delta
from spectral.operations import bound_states

logger = logging.getLogger(__name__)

RHO0 = (3.0 + math.sqrt(17.0)) / 2.0

# narrow Gaussians and times probing t^(1/2) ||G(t) f||_inf / ||f||_1
DISPERSIVE_CENTERS = (-2.0, -0.5, 0.0, 1.0)
DISPERSIVE_WIDTH = 0.25
DISPERSIVE_TIMES = (0.5, 1.0, 2.0)


def exponents(rho) -> Tuple[Fraction, Fraction, float]:
    """(theta, zeta, rho0); theta and zeta are exact fractions"""
    theta, zeta = weight_exponents(rho)
    return theta, zeta, RHO0


def beta_function(nu: float, eta: float, order: int = 32) -> float:
    """integral_0^1 (1 - s)^(nu - 1) s^(eta - 1) ds.

    Split at 1/2 so that every half has one algebraic endpoint
    singularity; it goes into a Gauss-Jacobi weight and the remaining
    factor is smooth.
    """
    if nu <= 0 or eta <= 0:
        raise ValidationError('beta function needs positive arguments')
    return _half_beta(eta, nu, order) + _half_beta(nu, eta, order)


def _half_beta(near: float, far: float, order: int) -> float:
    """integral_0^(1/2) s^(near - 1) (1 - s)^(far - 1) ds with s = (1 + x) / 4"""
    x, w = roots_jacobi(order, 0.0, near - 1.0)
    s = (1.0 + x) / 4.0
    return float(np.sum(w * (1.0 - s) ** (far - 1.0)) / 4.0 ** near)


def require_global_regime(rho) -> None:
    theta, zeta = weight_exponents(rho)
    if zeta >= 1 or theta * Fraction(rho) >= 1:
        raise ValidationError(f'outside global regime rho <= rho0 = {RHO0:.10f}')


def is_contractive(rho: float, eps: float, constant: float) -> bool:
    return 2.0 ** rho * eps ** (rho - 1.0) * constant < 1.0


def budget(rho: float, eps: float, constant: float) -> float:
    return 2.0 ** rho * eps ** (rho - 1.0) * constant


def contraction_budget(params: SolverParams,
                       c_disp: Optional[float] = None) -> Tuple[float, bool]:
    """K = C_disp B(1 - zeta, 1 - theta rho) and the verdict 2^rho eps^(rho-1) K < 1"""
    require_global_regime(params.rho)
    if c_disp is None:
        c_disp = dispersive_constant(params.sigma)
    constant = c_disp * beta_function(1.0 - params.zeta, 1.0 - params.theta * params.rho)
    return constant, is_contractive(params.rho, params.eps, constant)


@lru_cache(maxsize=None)
def dispersive_constant(sigma: float) -> float:
    """max of t^(1/2) ||G_sigma(t) f||_inf / ||f||_1 over a fixed sample set"""
    grid = Grid.from_extent(settings.GRID_X_MAX, settings.GRID_POINTS)
    ratios = []
    for center in DISPERSIVE_CENTERS:
        f = gaussian(grid, center=center, width=DISPERSIVE_WIDTH)
        mass = l1_norm(f)
        for t in DISPERSIVE_TIMES:
            u = delta_propagate(f, sigma, t)
            ratios.append(math.sqrt(t) * u.sup_norm() / mass)
    constant = max(ratios)
    logger.info('dispersive constant for sigma=%g: %.6f', sigma, constant)
    return constant


def _group(sigma: float):
    def apply(f: GridFunction, t: float) -> GridFunction:
        return delta_propagate(f, sigma, t, PropagatorMethod.CLOSED_FORM)
    return apply


def nonlinearity(u: GridFunction, rho: float) -> GridFunction:
    """|u|^(rho - 1) u pointwise, any real rho > 1"""
    return u.with_values(np.abs(u.values) ** (rho - 1.0) * u.values)


def weighted_profile(states: Sequence[GridFunction], times: Sequence[float],
                     rho: float) -> np.ndarray:
    """|t|^theta ||u(t)||_(rho+1, inf) at every grid time"""
    theta = float(weight_exponents(rho)[0])
    return np.array([abs(t) ** theta * weak_lp_norm(state, rho + 1.0)
                     for t, state in zip(times, states)])


def weighted_norm(states: Sequence[GridFunction], times: Sequence[float], rho: float) -> float:
    """sup over the time grid of the weighted profile"""
    return float(np.max(weighted_profile(states, times, rho)))


def trajectory_norm(traj: Trajectory, params: SolverParams) -> float:
    return weighted_norm(traj.states, traj.times, params.rho)


@lru_cache(maxsize=None)
def _jacobi_rule(points: int, zeta: float, theta_rho: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes w and weights for integral_0^1 (1-w)^(-zeta) w^(-theta rho) g(w) dw,
    already divided by the weight so that they act on the full integrand"""
    x, weights = roots_jacobi(points, -zeta, -theta_rho)
    w = (x + 1.0) / 2.0
    weights = weights * 2.0 ** (zeta + theta_rho - 1.0)
    return w, weights * (1.0 - w) ** zeta * w ** theta_rho


def linear_trajectory(u0: GridFunction, params: SolverParams) -> Trajectory:
    group = _group(params.sigma)
    return Trajectory(params.times, tuple(group(u0, t) for t in params.times), initial=u0)


def duhamel_nonlinear(traj: Trajectory, params: SolverParams) -> Trajectory:
    """-i lambda integral_0^t G_sigma(t - s) |u(s)|^(rho-1) u(s) ds at every grid time"""
    if params.sigma < 0:
        raise ValidationError('nonlinear solver needs sigma >= 0')
    if tuple(traj.times) != params.times:
        raise ValidationError('trajectory times do not match the solver times')
    grid = traj.grid
    if params.linear:
        return traj.map_states(GridFunction.zeros(grid) for _ in params.times)

    group = _group(params.sigma)
    w, weights = _jacobi_rule(params.s_quad_points, params.zeta, params.theta * params.rho)
    factor = -1j * params.lambda_sign
    states = []
    for t in params.times:
        values = np.zeros(grid.n, dtype=complex)
        for node, weight in zip(w, weights):
            source = nonlinearity(traj.state_at(t * node), params.rho)
            values += weight * group(source, t * (1.0 - node)).values
        states.append(GridFunction(grid, factor * t * values))
    return traj.map_states(states)


def _difference(first: Trajectory, second: Trajectory):
    return [a - b for a, b in zip(first.states, second.states)]


def picard_solve(u0: GridFunction, params: SolverParams,
                 c_disp: Optional[float] = None) -> Trajectory:
    """Iterate u <- G(t) u0 + N(u) from the linear evolution.

    Stops once the weighted distance of successive iterates drops below
    `tol`; three growing steps in a row raise NumericalFailure.
    """
    if params.sigma < 0:
        raise ValidationError('nonlinear solver needs sigma >= 0')
    constant, contractive = contraction_budget(params, c_disp)
    flags = set()
    if not contractive:
        logger.warning('budget %.3f >= 1: iteration is uncontrolled',
                       budget(params.rho, params.eps, constant))
        flags.add('uncontrolled')

    linear = linear_trajectory(u0, params)
    linear_norm = trajectory_norm(linear, params)
    if linear_norm > params.eps * (1 + 1e-9):
        logger.warning('linear weighted norm %.4e exceeds eps %.4e', linear_norm, params.eps)
        flags.add('data_exceeds_eps')
    if params.linear:
        return Trajectory(linear.times, linear.states, u0, (linear_norm,), (0.0,),
                          frozenset(flags))

    current = linear
    history, distances = [linear_norm], []
    streak = 0
    for iteration in range(1, params.max_iters + 1):
        try:
            with np.errstate(over='raise'):
                nonlinear = duhamel_nonlinear(current, params)
        except FloatingPointError as exc:
            raise NumericalFailure('contraction failed', {
                'distances': distances,
                'weighted_history': history,
                'overflow_at': iteration,
            }) from exc
        following = current.map_states(
            a + b for a, b in zip(linear.states, nonlinear.states))
        distance = weighted_norm(_difference(following, current), params.times, params.rho)
        distances.append(distance)
        history.append(trajectory_norm(following, params))
        logger.info('picard iteration %d: distance %.3e, weighted norm %.6e',
                    iteration, distance, history[-1])
        current = following

        if len(distances) > 1 and distances[-2] > 0 and distance > distances[-2]:
            streak += 1
        else:
            streak = 0
        if streak >= settings.PICARD_DIVERGENCE_STREAK:
            raise NumericalFailure('contraction failed', {
                'distances': distances,
                'weighted_history': history,
                'budget': budget(params.rho, params.eps, constant),
            })
        if distance < params.tol:
            break
    else:
        logger.warning('picard iteration stopped at the cap of %d', params.max_iters)
        flags.add('unconverged')

    return Trajectory(current.times, current.states, u0, tuple(history), tuple(distances),
                      frozenset(flags))


def picard_residual(traj: Trajectory, u0: GridFunction, params: SolverParams) -> float:
    """weighted norm of u - G(t) u0 - N(u)"""
    linear = linear_trajectory(u0, params)
    nonlinear = duhamel_nonlinear(traj, params)
    residual = [u - g - n for u, g, n in zip(traj.states, linear.states, nonlinear.states)]
    return weighted_norm(residual, params.times, params.rho)


def scale_to_budget(u0: GridFunction, params: SolverParams, target: float,
                    c_disp: Optional[float] = None) -> Tuple[GridFunction, float]:
    """Rescale u0 so that 2^rho eps^(rho-1) K equals `target`, where eps is
    the weighted norm of the linear evolution; returns (data, eps)"""
    if target <= 0:
        raise ValidationError('target budget must be positive')
    constant, _ = contraction_budget(params, c_disp)
    eps = (target / (2.0 ** params.rho * constant)) ** (1.0 / (params.rho - 1.0))
    current = trajectory_norm(linear_trajectory(u0, params), params)
    if current == 0:
        raise ValidationError('cannot rescale zero data')
    return u0 * (eps / current), eps


def asymptotic_diag(u: Trajectory, v: Trajectory, u0: GridFunction, v0: GridFunction,
                    params: SolverParams) -> DecayCurves:
    """t^theta ||u - v|| against t^theta ||G(t)(u0 - v0)||"""
    if tuple(u.times) != tuple(v.times):
        raise ValidationError('trajectories are on different times')
    theta = params.theta
    p = params.rho + 1.0
    group = _group(params.sigma)
    difference = u0 - v0
    values, reference = [], []
    for t, first, second in zip(u.times, u.states, v.states):
        values.append(abs(t) ** theta * weak_lp_norm(first - second, p))
        reference.append(abs(t) ** theta * weak_lp_norm(group(difference, t), p))
    return DecayCurves(times=np.array(u.times), values=np.array(values),
                       reference=np.array(reference))


def orbit_manifold_diag(u0: GridFunction, sigma: float, times, p: float = 1.0,
                        pad_to: Optional[float] = None) -> DecayCurves:
    """Distance of G_sigma(t) u0 from the periodic orbit through its bound-state
    component, in weak L^p' (sup norm for p = 1)"""
    if sigma >= 0:
        raise ValidationError('periodic orbits need sigma < 0')
    if not 1 <= p <= 2:
        raise ValidationError('orbit diagnostic needs 1 <= p <= 2')
    times = np.asarray(times, dtype=float)
    if np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ValidationError('times must be positive and increasing')

    pad_to = pad_to or u0.grid.x_max + settings.DECAY_SPREAD * times[-1]
    f = extend(u0, pad_to)
    state = bound_states(Delta(sigma))[0]
    orbit = GridFunction.from_callable(f.grid, state)
    projection = inner(f, orbit)
    dual = math.inf if p == 1 else p / (p - 1.0)

    values = []
    for t in times:
        u = delta_propagate(f, sigma, t)
        remainder = u - orbit * (state.phase(t) * projection)
        values.append(weak_lp_norm(remainder, dual))
    values = np.array(values)

    flags = set()
    slope = None
    if np.all(values > 0) and times.shape[0] > 1:
        slope = float(linregress(np.log(times), np.log(values)).slope)
    else:
        flags.add('on_orbit')
    logger.info('orbit distance |<u0, Psi>| = %.6f, slope %s', abs(projection), slope)
    return DecayCurves(times=times, values=values, fitted_slope=slope,
                       expected_slope=-0.5 * (2.0 / p - 1.0), projection=projection,
                       flags=frozenset(flags))
