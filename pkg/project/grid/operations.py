"""Integration, convolution, reflection and zero-padding on uniform grids"""
import logging
from typing import Optional, Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from scipy.integrate import trapezoid

from grid.models import Grid, GridFunction

logger = logging.getLogger(__name__)

# 4th-order one-sided first derivative, nodes x0, x0 + h, ..., x0 + 4h
FORWARD_STENCIL = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
# 4th-order extrapolation of f(x0) from x0 + h, ..., x0 + 4h
_LIMIT_STENCIL = np.array([4.0, -6.0, 4.0, -1.0])


def integrate(f: GridFunction) -> complex:
    """Composite trapezoid rule over [x_min, x_max]"""
    return complex(trapezoid(f.values, dx=f.grid.h))


def inner(f: GridFunction, g: GridFunction) -> complex:
    """<f, g> = integral of f * conj(g)"""
    if f.grid != g.grid:
        raise ValidationError('incompatible grids')
    return integrate(f.with_values(f.values * np.conj(g.values)))


def l2_norm(f: GridFunction) -> float:
    return float(np.sqrt(trapezoid(np.abs(f.values) ** 2, dx=f.grid.h)))


def l1_norm(f: GridFunction) -> float:
    return float(trapezoid(np.abs(f.values), dx=f.grid.h))


def fft_convolve(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    length = first.shape[-1] + second.shape[-1] - 1
    n_fft = 2 ** (length - 1).bit_length()

    spectrum = np.fft.fft(first, n=n_fft) * np.fft.fft(second, n=n_fft)
    return np.fft.ifft(spectrum)[:length]


def convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Linear convolution h * sum f(y) g(x - y), restricted to f.grid.

    The full product lives on nodes f.x_min + g.x_min + k h; node i of
    f.grid sits at k = i - g.x_min / h, so g.x_min has to be a multiple
    of h.
    """
    h = f.grid.h
    if abs(g.grid.h - h) > 1e-12 * h:
        raise ValidationError('incompatible grids')

    shift = -g.grid.x_min / h
    offset = int(round(shift))
    if abs(shift - offset) > 1e-6:
        raise ValidationError('incompatible grids')

    full = fft_convolve(f.values, g.values) * h

    result = np.zeros(f.grid.n, dtype=complex)
    index = np.arange(f.grid.n) + offset
    inside = (index >= 0) & (index < full.shape[0])
    result[inside] = full[index[inside]]
    return GridFunction(f.grid, result, f.flags | g.flags)


def reflect(f: GridFunction) -> GridFunction:
    """(Rf)(x) = f(-x)"""
    f.grid.require_symmetric()
    return f.with_values(f.values[::-1])


def left_mask(grid: Grid) -> np.ndarray:
    """Characteristic function of (-inf, 0] with weight 1/2 at x = 0"""
    grid.require_symmetric()
    x = grid.x
    mask = (x < 0).astype(float)
    zero = grid.index_of(0.0)
    if zero >= 0:
        mask[zero] = 0.5
    return mask


def right_mask(grid: Grid) -> np.ndarray:
    return left_mask(grid)[::-1]


def halfline_split(f: GridFunction) -> Tuple[GridFunction, GridFunction]:
    """(phi_minus, phi_plus), both supported in x <= 0, f = phi_minus + R phi_plus"""
    mask = left_mask(f.grid)
    return (f.with_values(f.values * mask),
            f.with_values(f.values[::-1] * mask))


def boundary_mass(f: GridFunction, fraction: Optional[float] = None) -> float:
    """Largest |f| over the outer `fraction` of nodes on both ends"""
    fraction = settings.BOUNDARY_FRACTION if fraction is None else fraction
    width = max(1, int(f.grid.n * fraction))
    edges = np.concatenate([f.values[:width], f.values[-width:]])
    return float(np.max(np.abs(edges)))


def check_boundary(f: GridFunction, flag: str = 'boundary_mass',
                   tolerance: Optional[float] = None) -> GridFunction:
    """Flag f when it does not decay towards the grid ends"""
    tolerance = settings.BOUNDARY_TOLERANCE if tolerance is None else tolerance
    mass = boundary_mass(f)
    if mass > tolerance:
        logger.warning('%s: |f| = %.3e near the grid ends', flag, mass)
        return f.with_flags(flag)
    return f


def _one_sided_nodes(f: GridFunction, point: float, side: int) -> np.ndarray:
    index = f.grid.index_of(point)
    if index < 0:
        raise ValidationError(f'x = {point} is not a grid node')
    nodes = index + side * np.arange(5)
    if nodes.min() < 0 or nodes.max() >= f.grid.n:
        raise ValidationError(f'not enough nodes beside x = {point}')
    return f.values[nodes]


def one_sided_limit(f: GridFunction, point: float, side: int) -> complex:
    """f(point +- 0) extrapolated from the neighbours, ignoring the node itself"""
    samples = _one_sided_nodes(f, point, side)
    return complex(np.dot(_LIMIT_STENCIL, samples[1:]))


def one_sided_derivative(f: GridFunction, point: float, side: int,
                         use_limit: bool = False) -> complex:
    """f'(point +- 0); side is +1 (right) or -1 (left).

    With `use_limit` the node value at `point` is replaced by the one-sided
    limit, for functions that jump there.
    """
    samples = _one_sided_nodes(f, point, side).copy()
    if use_limit:
        samples[0] = np.dot(_LIMIT_STENCIL, samples[1:])
    return complex(side * np.dot(FORWARD_STENCIL, samples) / f.grid.h)


def extend(f: GridFunction, x_max: float) -> GridFunction:
    """Zero-pad f onto the symmetric grid [-x_max, x_max] with the same step"""
    f.grid.require_symmetric()
    f.grid.require_origin()
    h = f.grid.h
    half = int(np.ceil(x_max / h - 1e-9))
    old_half = (f.grid.n - 1) // 2
    if half <= old_half:
        return f
    grid = Grid(-half * h, half * h, 2 * half + 1)
    values = np.zeros(grid.n, dtype=complex)
    values[half - old_half:half + old_half + 1] = f.values
    return GridFunction(grid, values, f.flags)
