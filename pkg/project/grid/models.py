"""Uniform 1D grids and complex samples on them"""
from dataclasses import dataclass, field, replace
from typing import Callable, FrozenSet

import numpy as np
from django.core.exceptions import ValidationError


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError('grid needs at least two nodes')
        if not self.x_min < self.x_max:
            raise ValidationError('grid requires x_min < x_max')

    @classmethod
    def from_extent(cls, x_max: float, n: int) -> 'Grid':
        """Symmetric grid [-x_max, x_max]"""
        return cls(-float(x_max), float(x_max), int(n))

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def is_symmetric(self) -> bool:
        scale = max(abs(self.x_min), abs(self.x_max))
        return abs(self.x_min + self.x_max) <= 1e-12 * scale

    def index_of(self, point: float) -> int:
        """Index of the node at `point`, -1 when `point` is not a node"""
        position = (point - self.x_min) / self.h
        index = int(round(position))
        if 0 <= index < self.n and abs(position - index) < 1e-9:
            return index
        return -1

    def contains(self, point: float) -> bool:
        return self.index_of(point) >= 0

    def require_symmetric(self) -> None:
        if not self.is_symmetric:
            raise ValidationError('grid is not symmetric about 0')

    def require_origin(self) -> None:
        if not self.contains(0.0):
            raise ValidationError('grid does not contain x = 0')


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray
    flags: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise ValidationError(
                f'expected {self.grid.n} samples, got {values.shape}')
        if not np.all(np.isfinite(values)):
            raise ValidationError('grid function has non-finite samples')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable) -> 'GridFunction':
        return cls(grid, fn(grid.x))

    @classmethod
    def zeros(cls, grid: Grid) -> 'GridFunction':
        return cls(grid, np.zeros(grid.n, dtype=complex))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values) -> 'GridFunction':
        return GridFunction(self.grid, values, self.flags)

    def with_flags(self, *flags: str) -> 'GridFunction':
        return replace(self, flags=self.flags | frozenset(flags))

    def conj(self) -> 'GridFunction':
        return self.with_values(np.conj(self.values))

    def __add__(self, other: 'GridFunction') -> 'GridFunction':
        self._check_same_grid(other)
        return GridFunction(self.grid, self.values + other.values,
                            self.flags | other.flags)

    def __sub__(self, other: 'GridFunction') -> 'GridFunction':
        self._check_same_grid(other)
        return GridFunction(self.grid, self.values - other.values,
                            self.flags | other.flags)

    def __mul__(self, scalar) -> 'GridFunction':
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _check_same_grid(self, other: 'GridFunction') -> None:
        if other.grid != self.grid:
            raise ValidationError('incompatible grids')


def gaussian(grid: Grid, center: float = 0.0, width: float = 1.0,
             amplitude: complex = 1.0) -> GridFunction:
    """amplitude * exp(-((x - center) / width)^2)"""
    return GridFunction.from_callable(
        grid, lambda x: amplitude * np.exp(-((x - center) / width) ** 2))
