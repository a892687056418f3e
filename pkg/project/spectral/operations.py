"""Bound states, scattering data and the generalized Fourier transform"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from scipy.integrate import quad, trapezoid
from scipy.optimize import bisect

from grid.models import GridFunction
from grid.operations import boundary_mass, inner, l2_norm
from spectral.models import (BoundState, Delta, DeltaPrime, PointInteraction,
                             ScatteringData, SpectralTransform, TwoDelta)

logger = logging.getLogger(__name__)

BRANCH_POINT = -math.exp(-1.0)
RESIDUAL_TOLERANCE = 1e-10


def lambert_w0(x: float) -> float:
    """Principal branch of w e^w = x for real x >= -1/e.

    Start from the branch-point series or from
    log(1+x) (1 - log(1 + log(1+x)) / (2 + log(1+x))), take two Newton
    steps and finish with Halley's method.
    """
    x = float(x)
    if x < BRANCH_POINT - 1e-15:
        raise ValidationError(f'x = {x} is outside real Lambert domain')
    if x <= BRANCH_POINT:
        return -1.0
    if x == 0.0:
        return 0.0

    if x - BRANCH_POINT <= 0.3:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    else:
        log_x = math.log1p(x)
        w = log_x * (1.0 - math.log1p(log_x) / (2.0 + log_x))

    for _ in range(2):
        ew = math.exp(w)
        if w + 1.0 == 0.0:
            break
        w -= (w * ew - x) / (ew * (w + 1.0))

    for _ in range(100):
        ew = math.exp(w)
        residual = w * ew - x
        w1 = w + 1.0
        if w1 == 0.0:
            break
        dw = residual / (ew * w1 - (w + 2.0) * residual / (2.0 * w1))
        w -= dw
        if abs(dw) < 0.7e-16 * (2.0 + abs(w)):
            break
    return w


def two_delta_residual(gamma: float, alpha: float, a: float) -> float:
    """|(2 kappa + alpha)^2 - alpha^2 e^(-4 kappa a)| with kappa = sqrt(-gamma)"""
    if not gamma < 0:
        raise ValidationError('two-delta residual needs gamma < 0')
    kappa = math.sqrt(-gamma)
    return abs((2.0 * kappa + alpha) ** 2 - alpha ** 2 * math.exp(-4.0 * kappa * a))


def two_delta_bisection(alpha: float, a: float, parity: str = 'even') -> Optional[float]:
    """Independent root of the implicit eigenvalue equation, or None.

    With c = -alpha > 0 the even state solves 2 kappa = c (1 + e^(-2 kappa a))
    on (c/2, c], the odd one 2 kappa = c (1 - e^(-2 kappa a)) on (0, c/2).
    """
    if alpha >= 0:
        return None
    c = -alpha
    if parity == 'even':
        kappa = bisect(lambda k: 2 * k - c * (1 + math.exp(-2 * k * a)),
                       c / 2, c, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    elif parity == 'odd':
        if c * a <= 1:
            return None
        kappa = bisect(lambda k: 2 * k - c * (1 - math.exp(-2 * k * a)),
                       1e-12 * c, c / 2, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    else:
        raise ValidationError(f'unknown parity {parity}')
    return -kappa ** 2


def _delta_eigenfunction(sigma: float):
    scale = math.sqrt(-sigma / 2.0)
    return lambda x: scale * np.exp(sigma * np.abs(x) / 2.0)


def _deltaprime_eigenfunction(beta: float):
    scale = math.sqrt(-2.0 / beta)
    return lambda x: scale * np.sign(x) * np.exp(2.0 * np.abs(x) / beta)


def _two_delta_eigenfunction(kappa: float, a: float, sign: float):
    """e^(-kappa |x+a|) + sign * e^(-kappa |x-a|), L2-normalized"""
    norm_square = 2.0 / kappa + sign * 2.0 * math.exp(-2.0 * kappa * a) * (2.0 * a + 1.0 / kappa)
    scale = 1.0 / math.sqrt(norm_square)
    return lambda x: scale * (np.exp(-kappa * np.abs(x + a))
                              + sign * np.exp(-kappa * np.abs(x - a)))


def _two_delta_gamma(alpha: float, a: float, argument: float, parity: str) -> float:
    gamma = -(lambert_w0(argument) - a * alpha) ** 2 / (4.0 * a * a)
    residual = two_delta_residual(gamma, alpha, a)
    if residual > RESIDUAL_TOLERANCE:
        polished = two_delta_bisection(alpha, a, parity)
        logger.warning('two-delta %s level: Lambert residual %.2e, using bisection',
                       parity, residual)
        gamma = polished
    return gamma


def bound_states(pi: PointInteraction) -> List[BoundState]:
    if isinstance(pi, Delta):
        if pi.sigma >= 0:
            return []
        return [BoundState(-pi.sigma ** 2 / 4.0, _delta_eigenfunction(pi.sigma))]

    if isinstance(pi, DeltaPrime):
        if pi.beta >= 0:
            return []
        return [BoundState(-4.0 / pi.beta ** 2, _deltaprime_eigenfunction(pi.beta))]

    if isinstance(pi, TwoDelta):
        alpha, a = pi.alpha, pi.a
        if alpha >= 0:
            return []

        states = []
        gamma = _two_delta_gamma(alpha, a, -a * alpha * math.exp(a * alpha), 'even')
        states.append(BoundState(gamma, _two_delta_eigenfunction(math.sqrt(-gamma), a, 1.0), 1))
        if a > -1.0 / alpha and not pi.on_excluded_line:
            gamma = _two_delta_gamma(alpha, a, a * alpha * math.exp(a * alpha), 'odd')
            eigenfunction = _two_delta_eigenfunction(math.sqrt(-gamma), a, -1.0)
            states.append(BoundState(gamma, eigenfunction, 2))
        return states

    raise ValidationError(f'unknown point interaction {pi!r}')


def eigenvalue_count_sweep(alpha: float, a_values: Sequence[float]) -> List[int]:
    """Number of bound states of the two-delta operator along a in a_values"""
    return [len(bound_states(TwoDelta(alpha, a))) for a in a_values]


def scattering_coefficients(sigma: float, lam) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized t = 2i lam / (2i lam - sigma), r = sigma / (2i lam - sigma)"""
    lam = np.asarray(lam, dtype=float)
    denominator = 2j * lam - sigma
    if np.any(denominator == 0):
        raise ValidationError('degenerate scattering at sigma = 0, lambda = 0')
    return 2j * lam / denominator, sigma / denominator


def scattering(sigma: float, lam: float) -> ScatteringData:
    t_coeff, r_coeff = scattering_coefficients(sigma, lam)
    return ScatteringData(lam=float(lam), t_coeff=complex(t_coeff),
                          r_coeff=complex(r_coeff))


def eigenfunction_matrix(sigma: float, lam: np.ndarray, x: np.ndarray) -> np.ndarray:
    """psi_lam(x) broadcast over lam and x.

    Where x and lam have the same sign the wave is transmitted,
    t e^{i lam x}; on the incoming side it is e^{i lam x} + r e^{-i lam x}.
    """
    plane = np.exp(1j * lam * x)
    if sigma == 0:
        return plane
    t_coeff, r_coeff = scattering_coefficients(sigma, np.abs(lam))
    transmitted = lam * x >= 0
    return np.where(transmitted, t_coeff * plane, plane + r_coeff * np.conj(plane))


def generalized_eigenfunction(sigma: float, lam: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return eigenfunction_matrix(sigma, np.asarray(float(lam)), x)


def generalized_fourier(f: GridFunction, sigma: float, lambdas,
                        chunk: Optional[int] = None) -> SpectralTransform:
    """(2 pi)^(-1/2) * integral f(x) conj(psi_lam(x)) dx for every lam"""
    chunk = chunk or settings.SPECTRAL_CHUNK
    lambdas = np.asarray(lambdas, dtype=float)
    x = f.grid.x
    values = np.empty(lambdas.shape[0], dtype=complex)
    for start in range(0, lambdas.shape[0], chunk):
        block = lambdas[start:start + chunk, None]
        kernel = np.conj(eigenfunction_matrix(sigma, block, x[None, :]))
        values[start:start + chunk] = trapezoid(f.values[None, :] * kernel,
                                                dx=f.grid.h, axis=1)
    values /= math.sqrt(2.0 * math.pi)

    flags = frozenset()
    if boundary_mass(f) > settings.DECAY_TOLERANCE:
        logger.warning('generalized Fourier transform: f does not decay at the grid ends')
        flags = frozenset({'insufficient_decay'})
    return SpectralTransform(lambdas=lambdas, values=values, flags=flags)


def project_bound_states(f: GridFunction, pi: PointInteraction) -> List[Tuple[BoundState, complex]]:
    """[(state, <f, state>)] for every bound state of pi"""
    return [(state, inner(f, f.with_values(state(f.grid.x))))
            for state in bound_states(pi)]


def plancherel_defect(f: GridFunction, sigma: float, lambdas) -> float:
    """||f||^2 - sum |<f, e_j>|^2 - integral |F f|^2, zero by completeness"""
    transform = generalized_fourier(f, sigma, lambdas)
    continuous = trapezoid(np.abs(transform.values) ** 2, transform.lambdas)
    discrete = sum(abs(weight) ** 2
                   for _, weight in project_bound_states(f, Delta(sigma)))
    return float(l2_norm(f) ** 2 - discrete - continuous)


def singular_points(pi: PointInteraction) -> List[float]:
    if isinstance(pi, TwoDelta):
        return [-pi.a, pi.a]
    return [0.0]


def bound_state_norm(state: BoundState, pi: PointInteraction) -> float:
    """L2 norm by adaptive quadrature between the singular points"""
    edges = [-np.inf] + singular_points(pi) + [np.inf]
    total = sum(quad(lambda x: abs(state(x)) ** 2, left, right)[0]
                for left, right in zip(edges[:-1], edges[1:]))
    return math.sqrt(total)
