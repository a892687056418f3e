"""Linear Schrödinger groups of the free Laplacian and the point interactions.

Convention: u = e^{-itH} u0 with H = -d^2/dx^2 plus the interaction, so the
free group is the Fourier multiplier e^{-i k^2 t} and its kernel is
S(x, t) = (4 pi i t)^(-1/2) e^{i x^2 / (4t)} with the principal root.
"""
import logging
import math
from functools import lru_cache
from typing import FrozenSet, Optional, Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from scipy.signal import czt
from scipy.special import erfcx, roots_laguerre, roots_legendre
from scipy.stats import linregress

from grid.models import Grid, GridFunction
from grid.operations import (FORWARD_STENCIL, check_boundary, convolve, extend, fft_convolve,
                             halfline_split, left_mask, one_sided_derivative, one_sided_limit,
                             reflect, right_mask)
from lorentz.operations import weak_lp_norm
from propagator.models import DecayScanResult, PropagatorMethod
from spectral.models import Delta, DeltaPrime, PointInteraction, TwoDelta
from spectral.operations import (bound_states, eigenfunction_matrix, generalized_fourier,
                                 project_bound_states)

logger = logging.getLogger(__name__)

# panels whose quadratic phase turns by less than this use Gauss-Legendre moments
FILON_PHASE_SWITCH = 2.0
# corner subtraction: e^{-b|x - p|} is about e^{-KINK_DECAY} at the nearest grid end
KINK_DECAY = 40.0


def _require_time(t: float) -> None:
    if t == 0:
        raise ValidationError('kernel propagators need t != 0')


def free_kernel(x, t: float) -> np.ndarray:
    _require_time(t)
    x = np.asarray(x, dtype=float)
    return np.exp(1j * x ** 2 / (4.0 * t)) / np.sqrt(4j * math.pi * t)


def free_propagate(f: GridFunction, t: float) -> GridFunction:
    """e^{it Delta} f through the FFT; f has to vanish at the grid ends"""
    if t == 0:
        return f
    f = check_boundary(f)
    k = 2.0 * math.pi * np.fft.fftfreq(f.grid.n, d=f.grid.h)
    values = np.fft.ifft(np.exp(-1j * k ** 2 * t) * np.fft.fft(f.values))
    return f.with_values(values)


def free_propagate_kinked(f: GridFunction, t: float, points=(0.0,)) -> GridFunction:
    """free_propagate for data with corners at `points`.

    The derivative jump J at each corner p is removed by adding
    (J / 2b) e^{-b |x - p|}, whose free evolution is known in closed form,
    so the FFT only sees the smoothed remainder.
    """
    if t == 0:
        return f
    grid = f.grid
    smooth = f.values.astype(complex)
    corners = np.zeros(grid.n, dtype=complex)
    for point in points:
        index = grid.index_of(point)
        if index < 4 or index > grid.n - 5:
            continue
        jump = one_sided_derivative(f, point, 1) - one_sided_derivative(f, point, -1)
        if abs(jump) <= 1e-12 * max(1.0, f.sup_norm() / grid.h):
            continue
        b = max(1.0, KINK_DECAY / min(point - grid.x_min, grid.x_max - point))
        weight = jump / (2.0 * b)
        smooth += weight * np.exp(-b * np.abs(grid.x - point))
        corners -= weight * (exponential_tail(b, point - grid.x, t)
                             + exponential_tail(b, grid.x - point, t))
    return free_propagate(f.with_values(smooth), t) + f.with_values(corners)


def bound_state_part(pi: PointInteraction, f: GridFunction, t: float) -> GridFunction:
    """sum_j e^{-i gamma_j t} <f, e_j> e_j"""
    values = np.zeros(f.grid.n, dtype=complex)
    for state, weight in project_bound_states(f, pi):
        values += state.phase(t) * weight * state(f.grid.x)
    return f.with_values(values)


# Semi-infinite tails: integral_0^inf e^{-b u} S(u + shift, t) du

def exponential_tail(b: float, shift, t: float) -> np.ndarray:
    """Closed form through the scaled complementary error function.

    With a = -i / (4t) and w = sqrt(a) shift + b / (2 sqrt(a)) the tail is
    S-normalised e^{-a shift^2} erfcx(w) sqrt(pi) / (2 sqrt(a)). Valid for
    either sign of the shift.
    """
    _require_time(t)
    if b <= 0:
        raise ValidationError('exponential tail needs b > 0')
    shift = np.asarray(shift, dtype=float)
    alpha = -1j / (4.0 * t)
    root = np.sqrt(alpha)
    w = root * shift + b / (2.0 * root)
    value = np.exp(-alpha * shift ** 2) * erfcx(w) * math.sqrt(math.pi) / (2.0 * root)
    return value * free_kernel(0.0, t)


@lru_cache(maxsize=None)
def _laguerre_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return roots_laguerre(order)


def laguerre_tail(b: float, shift, t: float, order: int,
                  chunk: int = 1024) -> np.ndarray:
    """Gauss-Laguerre on the rotated ray u = s e^{+-i pi/4}.

    The rotation makes the quadratic phase decay, which is only allowed
    for shift >= 0. Each shift gets its own scale so that the rotated
    integrand behaves like e^{-v}.
    """
    _require_time(t)
    shift = np.asarray(shift, dtype=float)
    if np.any(shift < 0):
        raise ValidationError('Laguerre tail needs shift >= 0')
    nodes, weights = _laguerre_rule(order)
    omega = np.exp(1j * math.copysign(math.pi / 4.0, t))
    scale = (b / math.sqrt(2.0) + math.sqrt(2.0) * shift / (4.0 * abs(t))
             + 1.0 / (2.0 * math.sqrt(abs(t))))

    flat_shift, flat_scale = shift.ravel(), scale.ravel()
    result = np.empty(flat_shift.shape, dtype=complex)
    for start in range(0, flat_shift.shape[0], chunk):
        c = flat_shift[start:start + chunk, None]
        nu = flat_scale[start:start + chunk, None]
        u = omega * nodes[None, :] / nu
        exponent = nodes[None, :] - b * u + 1j * (u + c) ** 2 / (4.0 * t)
        result[start:start + chunk] = omega / nu[:, 0] * (np.exp(exponent) @ weights)
    return result.reshape(shift.shape) * free_kernel(0.0, t)


def kernel_tail(b: float, shift, t: float, order: Optional[int] = None,
                max_order: Optional[int] = None,
                tolerance: Optional[float] = None) -> Tuple[np.ndarray, FrozenSet[str]]:
    """Tail values with the order doubled until successive results agree"""
    shift = np.asarray(shift, dtype=float)
    if np.any(shift < 0):
        return exponential_tail(b, shift, t), frozenset()

    order = order or settings.LAGUERRE_ORDER
    max_order = max_order or settings.LAGUERRE_MAX_ORDER
    tolerance = settings.LAGUERRE_TOLERANCE if tolerance is None else tolerance

    previous = laguerre_tail(b, shift, t, order)
    while order < max_order:
        order *= 2
        current = laguerre_tail(b, shift, t, order)
        change = float(np.max(np.abs(current - previous)))
        if change < tolerance * max(1.0, float(np.max(np.abs(current)))):
            logger.debug('Laguerre tail converged at order %d', order)
            return current, frozenset()
        logger.info('Laguerre tail: change %.2e at order %d, doubling', change, order)
        previous = current
    logger.warning('Laguerre tail did not converge by order %d', max_order)
    return previous, frozenset({'laguerre_unconverged'})


def _fold_apply(kernel: np.ndarray, f: GridFunction, odd: bool) -> np.ndarray:
    """integral of K(|x| + |y|) f(y) dy, or of sgn(xy) K(|x| + |y|) f(y) dy.

    `kernel[m]` is K at m h. The sums over y >= 0 are correlations and
    go through the FFT.
    """
    grid = f.grid
    grid.require_symmetric()
    grid.require_origin()
    half = (grid.n - 1) // 2
    h = grid.h
    right = f.values[half:]
    left = f.values[half::-1]

    weights = np.full(half + 1, h)
    weights[0] = weights[-1] = h / 2.0
    if odd:
        folded = weights * (right - left)
        # the node at 0 carries the limit of the odd part from the right
        folded[0] = h * _odd_limit(f)
    else:
        folded = weights * (right + left)

    full = fft_convolve(kernel, folded[::-1])
    half_values = full[half:2 * half + 1]

    values = np.concatenate([half_values[:0:-1], half_values])
    if odd:
        values = values * np.sign(grid.x)
    return values


def _odd_part(f: GridFunction) -> GridFunction:
    return f.with_values((f.values - f.values[::-1]) / 2.0)


def _odd_limit(f: GridFunction) -> complex:
    return one_sided_limit(_odd_part(f), 0.0, 1)


def _tail_nodes(grid: Grid) -> np.ndarray:
    """c = |x| + |y| takes the values m h, m = 0 .. 2N"""
    return grid.h * np.arange(grid.n)


def reflection_density(sigma: float, grid: Grid) -> GridFunction:
    """rho_sigma: transform r_sigma, half weight at the jump x = 0"""
    x = grid.x
    if sigma >= 0:
        values = -(sigma / 2.0) * np.exp(sigma * np.minimum(x, 0.0) / 2.0) * left_mask(grid)
    else:
        values = (sigma / 2.0) * np.exp(sigma * np.maximum(x, 0.0) / 2.0) * right_mask(grid)
    return GridFunction(grid, values)


def _delta_closed_form(f: GridFunction, sigma: float, t: float) -> GridFunction:
    """Convolution formula, extended from left-supported data by parity.

    With f = phi_minus + R phi_plus, both halves supported in x <= 0, and
    g = rho * (phi_minus + phi_plus) the group acts as
    e^{it Delta}(f + g) on x >= 0 and e^{it Delta}(f + Rg) on x <= 0.
    """
    grid = f.grid
    grid.require_symmetric()
    grid.require_origin()
    if t == 0:
        return f

    minus, plus = halfline_split(f)
    folded = minus + plus
    g = convolve(folded, reflection_density(sigma, grid))
    right = free_propagate_kinked(f + g, t)
    left = free_propagate_kinked(f + reflect(g), t)

    values = np.where(grid.x > 0, right.values, left.values)
    zero = grid.index_of(0.0)
    values[zero] = 0.5 * (right.values[zero] + left.values[zero])
    u = GridFunction(grid, values, right.flags | left.flags)
    if sigma < 0:
        u = u + bound_state_part(Delta(sigma), f, t)
    return u


def _delta_kernel(f: GridFunction, sigma: float, t: float) -> GridFunction:
    _require_time(t)
    u = free_propagate_kinked(f, t)
    if sigma == 0:
        return u
    c = _tail_nodes(f.grid)
    if sigma > 0:
        tail, flags = kernel_tail(sigma / 2.0, c, t)
        kernel = -(sigma / 2.0) * tail
    else:
        tail, flags = kernel_tail(-sigma / 2.0, -c, t)
        kernel = (sigma / 2.0) * tail
    u = u + f.with_values(_fold_apply(kernel, f, odd=False)).with_flags(*flags)
    if sigma < 0:
        u = u + bound_state_part(Delta(sigma), f, t)
    return u


def _kink_trapezoid_weights(count: int, step: float) -> np.ndarray:
    """Trapezoid weights on 2 count + 1 nodes centred at 0, corrected for a
    corner at the centre node.

    The leading error term h^2 / 12 (q'(0+) - q'(0-)) is cancelled with
    one-sided difference stencils, so the rule stays spectrally accurate for
    oscillatory integrands away from the corner.
    """
    weights = np.full(2 * count + 1, step)
    weights[0] = weights[-1] = step / 2.0
    for k, coefficient in enumerate(FORWARD_STENCIL):
        weights[count + k] += step * coefficient / 12.0
        weights[count - k] += step * coefficient / 12.0
    return weights


def _delta_spectral(f: GridFunction, sigma: float, t: float,
                    lambda_max: Optional[float] = None,
                    lambda_step: Optional[float] = None) -> GridFunction:
    """Bound-state phase plus (2 pi)^(-1/2) int e^{-i lam^2 t} Ff(lam) psi_lam dlam.

    The lambda integrand has a corner at 0, handled by the corrected
    trapezoid rule.
    """
    _require_time(t)
    lambda_max = lambda_max or settings.SPECTRAL_LAMBDA_MAX
    lambda_step = lambda_step or settings.SPECTRAL_LAMBDA_STEP
    count = max(int(math.ceil(lambda_max / lambda_step)), 8)

    lambdas = lambda_step * np.arange(-count, count + 1)
    weights = _kink_trapezoid_weights(count, lambda_step)

    transform = generalized_fourier(f, sigma, lambdas)
    coefficients = (weights * np.exp(-1j * lambdas ** 2 * t) * transform.values
                    / math.sqrt(2.0 * math.pi))

    x = f.grid.x
    chunk = settings.SPECTRAL_CHUNK
    values = np.zeros(f.grid.n, dtype=complex)
    for start in range(0, lambdas.shape[0], chunk):
        block = lambdas[start:start + chunk, None]
        values += coefficients[start:start + chunk] @ eigenfunction_matrix(sigma, block, x[None, :])

    u = GridFunction(f.grid, values, transform.flags)
    if sigma < 0:
        u = u + bound_state_part(Delta(sigma), f, t)
    return u


def delta_propagate(f: GridFunction, sigma: float, t: float,
                    method: str = PropagatorMethod.CLOSED_FORM) -> GridFunction:
    logger.debug('delta propagate sigma=%g t=%g method=%s', sigma, t, method)
    if method == PropagatorMethod.CLOSED_FORM:
        return _delta_closed_form(f, sigma, t)
    if method == PropagatorMethod.KERNEL:
        return _delta_kernel(f, sigma, t)
    if method == PropagatorMethod.SPECTRAL:
        return _delta_spectral(f, sigma, t)
    raise ValidationError(f'unknown propagator method {method}')


def deltaprime_propagate(f: GridFunction, beta: float, t: float) -> GridFunction:
    """Even part evolves freely; the odd part sees the Robin condition
    psi'(0) = (2 / beta) psi(0) on the half line.

    For x > 0 the odd part is the free evolution of its even extension
    plus 2 integral_0^inf A(x + y) f_odd(y) dy.
    """
    _require_time(t)
    if beta == 0:
        return free_propagate(f, t)
    grid = f.grid
    grid.require_symmetric()
    grid.require_origin()

    even = f.with_values((f.values + f.values[::-1]) / 2.0)
    odd = _odd_part(f)
    zero = grid.index_of(0.0)
    extension = np.where(grid.x >= 0, odd.values, odd.values[::-1])
    extension[zero] = _odd_limit(f)
    reflected = free_propagate_kinked(odd.with_values(extension), t)

    kappa = 2.0 / beta
    c = _tail_nodes(grid)
    if beta > 0:
        tail, flags = kernel_tail(kappa, c, t)
        kernel = -kappa * tail
    else:
        tail, flags = kernel_tail(-kappa, -c, t)
        kernel = kappa * tail

    odd_values = np.sign(grid.x) * reflected.values + _fold_apply(kernel, f, odd=True)
    u = free_propagate_kinked(even, t) + GridFunction(grid, odd_values, reflected.flags | flags)
    if beta < 0:
        u = u + bound_state_part(DeltaPrime(beta), f, t)
    return u


# Two-delta: oscillatory xi-integral with Filon weights

def _filon_moments(left: np.ndarray, right: np.ndarray, t: float):
    """m_k = integral over [left, right] of s^k e^{-i t xi^2}, s = xi - middle"""
    middle = (left + right) / 2.0
    delta = (right - left) / 2.0

    root = np.sqrt(1j * t)
    phase_left = np.exp(-1j * t * left ** 2)
    phase_right = np.exp(-1j * t * right ** 2)
    m0 = (math.sqrt(math.pi) / (2.0 * root)
          * (phase_left * erfcx(root * left) - phase_right * erfcx(root * right)))
    m1 = (phase_right - phase_left) / (-2j * t) - middle * m0
    m2 = delta * (phase_right + phase_left) / (-2j * t) + m0 / (2j * t) - middle * m1

    # closed forms cancel badly on panels where the phase barely turns
    gentle = abs(t) * (right ** 2 - left ** 2) < FILON_PHASE_SWITCH
    if np.any(gentle):
        z, w = roots_legendre(16)
        s = delta[gentle, None] * z[None, :]
        xi = middle[gentle, None] + s
        integrand = w[None, :] * np.exp(-1j * t * xi ** 2) * delta[gentle, None]
        m0[gentle] = integrand.sum(axis=1)
        m1[gentle] = (integrand * s).sum(axis=1)
        m2[gentle] = (integrand * s ** 2).sum(axis=1)
    return m0, m1, m2


def filon_rule(edges: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for integral e^{-i t xi^2} q(xi) over [edges[0], edges[-1]],
    q interpolated quadratically on every panel"""
    edges = np.asarray(edges, dtype=float)
    left, right = edges[:-1], edges[1:]
    delta = (right - left) / 2.0
    m0, m1, m2 = _filon_moments(left, right, t)

    nodes = np.empty(2 * left.shape[0] + 1)
    nodes[0::2] = edges
    nodes[1::2] = (left + right) / 2.0
    weights = np.zeros(nodes.shape[0], dtype=complex)
    weights[0:-1:2] += (m2 - delta * m1) / (2.0 * delta ** 2)
    weights[1::2] += (delta ** 2 * m0 - m2) / delta ** 2
    weights[2::2] += (m2 + delta * m1) / (2.0 * delta ** 2)
    return nodes, weights


def _two_delta_tail(xi: float, alpha: float, mass: float, t: float, phase_rate: float) -> float:
    """Bound on the dropped part |integral_{|xi| > Xi}| from
    |D| >= (2|xi| - |alpha|)^2 - alpha^2, integrated once by parts"""
    gap = (2.0 * xi - abs(alpha)) ** 2 - alpha ** 2
    slope = 2.0 * abs(t) * xi - phase_rate
    if gap <= 0 or slope <= 0:
        return math.inf
    amplitude = 2.0 * mass * (abs(alpha) * (2.0 * xi + abs(alpha)) + alpha ** 2) / gap
    return 2.0 * amplitude / slope / (2.0 * math.pi)


def _two_delta_cutoff(alpha: float, mass: float, t: float, phase_rate: float,
                      h: float) -> Tuple[float, FrozenSet[str]]:
    tolerance = settings.TWO_DELTA_TOLERANCE
    cap = min(settings.TWO_DELTA_XI_MAX, 0.9 * math.pi / h)
    xi_max = min(max(2.0 * abs(alpha), 1.0, (phase_rate + 1.0) / abs(t)), cap)
    while _two_delta_tail(xi_max, alpha, mass, t, phase_rate) > tolerance:
        if xi_max >= cap:
            logger.warning('two-delta cutoff capped at %.1f, tail bound %.2e', cap,
                           _two_delta_tail(cap, alpha, mass, t, phase_rate))
            return cap, frozenset({'truncated'})
        xi_max = min(2.0 * xi_max, cap)
    return xi_max, frozenset()


def _branches(grid: Grid, point: float):
    """Nodes left and right of `point`, each ordered by distance, with the
    offset phi such that the k-th node of a branch sits at |x - point| = (k + phi) h"""
    position = (point - grid.x_min) / grid.h
    nearest = int(math.floor(position))
    if nearest < 0 or nearest >= grid.n - 1:
        raise ValidationError(f'interaction point {point} lies outside the grid')
    offset = position - nearest
    return ((np.arange(nearest, -1, -1), offset),
            (np.arange(nearest + 1, grid.n), 1.0 - offset))


def _kernel_table(coefficients: np.ndarray, start: float, step: float, offset: float,
                  h: float, length: int) -> np.ndarray:
    """(2 pi i)^(-1) sum_j c_j e^{i xi_j s} for xi_j = start + j step at the
    points s = (m + offset) h, m < length, as one chirp z-transform"""
    s = h * (np.arange(length) + offset)
    values = czt(coefficients, m=length, w=np.exp(1j * step * h),
                 a=np.exp(-1j * step * offset * h))
    return np.exp(1j * start * s) * values / (2j * math.pi)


def twodelta_propagate(f: GridFunction, alpha: float, a: float, t: float) -> GridFunction:
    """Free evolution plus the interaction part

    (2 pi i)^(-1) int e^{-it xi^2} [alpha (2 xi + i alpha)(e1 f1 + e2 f2)
        - i alpha^2 e^{2i xi a} (e1 f2 + e2 f1)] / D(xi) dxi,

    D = (2 xi + i alpha)^2 + alpha^2 e^{4i xi a}, e1 = e^{i xi |x + a|},
    e2 = e^{i xi |x - a|}, f1, f2 the matching integrals of f. For alpha < 0
    the same formula gives the continuous part and the eigen-terms are added.

    Each product e_i f_j turns the integral into a kernel of
    s = |x -+ a| + |y -+ a|. The two kernels are tabulated on the lattice of s
    values the grid produces and applied as correlations.
    """
    _require_time(t)
    pi = TwoDelta(alpha, a)
    pi.require_regular()
    u = free_propagate_kinked(f, t, points=(-a, 0.0, a))
    if alpha == 0:
        return u

    grid = f.grid
    h = grid.h
    weights_y = np.full(grid.n, h)
    weights_y[0] = weights_y[-1] = h / 2.0
    fy = f.values * weights_y
    mass = float(np.abs(fy).sum())

    phase_rate = 2.0 * float(np.max(np.abs(grid.x))) + 4.0 * a
    xi_max, flags = _two_delta_cutoff(alpha, mass, t, phase_rate, h)
    # the amplitude varies on the scale |alpha (1 + a alpha)| around xi = 0
    panel = math.pi / (4.0 * phase_rate)
    panel = max(min(panel, abs(alpha * (1.0 + a * alpha)) / 8.0), panel / 16.0)
    count = int(math.ceil(xi_max / panel))
    # shifted by a quarter panel: D vanishes at xi = 0 and only the sum of
    # the four terms below stays finite there
    edges = panel * (np.arange(-count, count + 1) + 0.25)
    nodes, weights = filon_rule(edges, t)
    logger.debug('two-delta: %d xi nodes up to %.1f', nodes.shape[0], xi_max)

    shift = np.exp(2j * nodes * a)
    denominator = (2.0 * nodes + 1j * alpha) ** 2 + alpha ** 2 * shift ** 2
    amplitudes = {
        'direct': weights * alpha * (2.0 * nodes + 1j * alpha) / denominator,
        'crossed': weights * (-1j * alpha ** 2) * shift / denominator,
    }

    branches = {point: _branches(grid, point) for point in (-a, a)}
    tables = {}
    extra = np.zeros(grid.n, dtype=complex)
    for center_x, center_y, kind in ((-a, -a, 'direct'), (a, a, 'direct'),
                                     (-a, a, 'crossed'), (a, -a, 'crossed')):
        for rows, phi_x in branches[center_x]:
            for columns, phi_y in branches[center_y]:
                key = (kind, round(phi_x + phi_y, 12))
                if key not in tables:
                    tables[key] = _kernel_table(amplitudes[kind], edges[0], panel / 2.0,
                                                phi_x + phi_y, h, 2 * grid.n)
                g = fy[columns]
                length = rows.shape[0] + g.shape[0] - 1
                full = fft_convolve(tables[key][:length], g[::-1])
                extra[rows] += full[g.shape[0] - 1:g.shape[0] - 1 + rows.shape[0]]

    u = u + GridFunction(grid, extra, flags)
    if alpha < 0:
        u = u + bound_state_part(pi, f, t)
    return u


def propagate(pi: PointInteraction, f: GridFunction, t: float,
              method: Optional[str] = None) -> GridFunction:
    """W(t) f for any interaction; delta defaults to the closed form"""
    if isinstance(pi, Delta):
        return delta_propagate(f, pi.sigma, t, method or PropagatorMethod.CLOSED_FORM)
    if method not in (None, PropagatorMethod.KERNEL):
        raise ValidationError(f'{method} is not available for {pi.kind}')
    if isinstance(pi, DeltaPrime):
        return deltaprime_propagate(f, pi.beta, t)
    if isinstance(pi, TwoDelta):
        return twodelta_propagate(f, pi.alpha, pi.a, t)
    raise ValidationError(f'unknown point interaction {pi!r}')


def boundary_jump(u: GridFunction, sigma: float) -> complex:
    """u'(0+) - u'(0-) - sigma u(0), zero for u in the operator domain"""
    zero = u.grid.index_of(0.0)
    if zero < 0:
        raise ValidationError('grid does not contain x = 0')
    return (one_sided_derivative(u, 0.0, 1) - one_sided_derivative(u, 0.0, -1)
            - sigma * u.values[zero])


def decay_scan(pi: PointInteraction, f: GridFunction, times,
               subtract_bound_states: bool = False, pad_to: Optional[float] = None,
               weak_p: Optional[float] = None, method: Optional[str] = None) -> DecayScanResult:
    """Sup norms of W(t) f on a grid wide enough to hold the spreading
    solution, with the log-log slope fitted by least squares"""
    times = np.asarray(times, dtype=float)
    if times.shape[0] < 2 or np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ValidationError('decay scan needs at least two positive increasing times')
    weak_p = weak_p or settings.DECAY_WEAK_P
    pad_to = pad_to or f.grid.x_max + settings.DECAY_SPREAD * times[-1]
    g = extend(f, pad_to)

    flags = set()
    if pi.attractive and not subtract_bound_states:
        logger.warning('%s is attractive: bound states keep the sup norm from decaying',
                       pi.kind)
        flags.add('no_decay_expected')
    bound_norm = bound_state_part(pi, g, 0.0).sup_norm() if bound_states(pi) else 0.0

    sup_norms, weak_norms = [], []
    for t in times:
        u = propagate(pi, g, t, method)
        if subtract_bound_states:
            u = u - bound_state_part(pi, g, t)
        flags.update(u.flags)
        sup_norms.append(u.sup_norm())
        weak_norms.append(weak_lp_norm(u, weak_p))
        logger.debug('t=%g sup=%.6e', t, sup_norms[-1])

    sup_norms = np.array(sup_norms)
    fit = linregress(np.log(times), np.log(sup_norms))
    return DecayScanResult(times=times, sup_norms=sup_norms, weak_norms=np.array(weak_norms),
                           fitted_slope=float(fit.slope), slope_stderr=float(fit.stderr),
                           bound_norm=bound_norm, flags=frozenset(flags))
