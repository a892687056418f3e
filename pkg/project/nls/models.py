from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Optional, Tuple

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError

from grid.models import GridFunction
from grid.operations import l2_norm


def weight_exponents(rho) -> Tuple[Fraction, Fraction]:
    """theta = 1/(rho - 1) - 1/(2(rho + 1)) and zeta = (rho - 1)/(2(rho + 1)),
    exact for rational rho"""
    rho = Fraction(rho)
    if rho <= 1:
        raise ValidationError('nonlinearity power rho must be > 1')
    theta = 1 / (rho - 1) - 1 / (2 * (rho + 1))
    zeta = (rho - 1) / (2 * (rho + 1))
    return theta, zeta


@dataclass(frozen=True)
class SolverParams:
    """Parameters of the weak-Lp Picard iteration.

    `times` is the finite time grid standing in for the sup over t; all
    entries share one sign and move away from 0. lambda_sign 0 switches the
    nonlinearity off.
    """
    rho: float
    eps: float
    times: Tuple[float, ...]
    sigma: float = 1.0
    lambda_sign: int = 1
    s_quad_points: int = field(default_factory=lambda: settings.DUHAMEL_QUAD_POINTS)
    max_iters: int = field(default_factory=lambda: settings.PICARD_MAX_ITERS)
    tol: float = field(default_factory=lambda: settings.PICARD_TOL)

    def __post_init__(self):
        weight_exponents(self.rho)
        object.__setattr__(self, 'times', tuple(float(t) for t in self.times))
        times = np.abs(np.array(self.times))
        if not self.times:
            raise ValidationError('solver needs at least one time')
        if np.any(times == 0) or np.any(np.diff(times) <= 0):
            raise ValidationError('times must be nonzero and move away from 0')
        if len({np.sign(t) for t in self.times}) > 1:
            raise ValidationError('times must share one sign')
        if self.lambda_sign not in (-1, 0, 1):
            raise ValidationError('lambda_sign must be -1, 0 or 1')
        if self.eps <= 0:
            raise ValidationError('eps must be positive')
        if self.s_quad_points < 1 or self.max_iters < 1 or self.tol <= 0:
            raise ValidationError('quadrature points, iteration cap and tolerance must be positive')

    @property
    def theta(self) -> float:
        return float(weight_exponents(self.rho)[0])

    @property
    def zeta(self) -> float:
        return float(weight_exponents(self.rho)[1])

    @property
    def linear(self) -> bool:
        return self.lambda_sign == 0


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: Tuple[float, ...]
    states: Tuple[GridFunction, ...]
    initial: Optional[GridFunction] = None
    weighted_history: Tuple[float, ...] = ()
    distances: Tuple[float, ...] = ()
    flags: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if len(self.states) != len(self.times):
            raise ValidationError('trajectory needs one state per time')

    @property
    def grid(self):
        return self.states[0].grid

    @property
    def iterations(self) -> int:
        return len(self.distances)

    @property
    def ratios(self) -> np.ndarray:
        """Successive distance ratios of the Picard iteration"""
        distances = np.array(self.distances)
        if distances.shape[0] < 2:
            return np.zeros(0)
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(distances[:-1] > 0, distances[1:] / distances[:-1], 0.0)

    def state_at(self, s: float) -> GridFunction:
        """Linear interpolation in time, with `initial` at s = 0"""
        times = np.abs(np.array(self.times))
        position = abs(s)
        if position > times[-1] * (1 + 1e-12):
            raise ValidationError(f'trajectory does not cover s = {s}')
        if position <= times[0]:
            if self.initial is None:
                raise ValidationError(f'trajectory does not cover s = {s}')
            left_time, right_time = 0.0, times[0]
            left, right = self.initial, self.states[0]
        else:
            index = min(int(np.searchsorted(times, position)), times.shape[0] - 1)
            left_time, right_time = times[index - 1], times[index]
            left, right = self.states[index - 1], self.states[index]
        weight = (position - left_time) / (right_time - left_time)
        return left.with_values((1 - weight) * left.values + weight * right.values)

    def map_states(self, states) -> 'Trajectory':
        return Trajectory(self.times, tuple(states), self.initial)

    def rows(self, weighted):
        for t, state, value in zip(self.times, self.states, weighted):
            yield t, value, state.sup_norm(), l2_norm(state)


@dataclass(frozen=True, eq=False)
class DecayCurves:
    """Per-time curves of a diagnostic; `reference` is the comparison curve"""
    times: np.ndarray
    values: np.ndarray
    reference: Optional[np.ndarray] = None
    fitted_slope: Optional[float] = None
    expected_slope: Optional[float] = None
    projection: complex = 0j
    flags: FrozenSet[str] = field(default_factory=frozenset)
