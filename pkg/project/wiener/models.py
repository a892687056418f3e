"""Fourier coefficients in l1 and finite atomic measures.

Both use the 2 pi convention: u(x) = sum_xi w(xi) e^(2 pi i x xi).
"""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Optional, Tuple, Union

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError


def _merge(locations, weights) -> Tuple[np.ndarray, np.ndarray]:
    """Round locations and add up weights that land on the same point"""
    rounded = np.round(np.asarray(locations, dtype=float), settings.WIENER_MERGE_DECIMALS)
    unique, inverse = np.unique(rounded, return_inverse=True)
    merged = np.zeros(unique.shape[0], dtype=complex)
    np.add.at(merged, inverse.ravel(), np.asarray(weights, dtype=complex))
    return unique + 0.0, merged


@dataclass(frozen=True, eq=False)
class FourierCoeffs:
    """Coefficients u(m) on the modes offset, offset + 1, ...

    Modes outside the window are zero.
    """
    offset: int
    values: np.ndarray
    dim: int = 1

    def __post_init__(self):
        if self.dim != 1:
            raise ValidationError('only one-dimensional tori are supported')
        values = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if values.ndim != 1 or values.shape[0] == 0:
            raise ValidationError('coefficients need a non-empty 1D window')
        if not np.all(np.isfinite(values)):
            raise ValidationError('coefficients are not finite')
        values.setflags(write=False)
        object.__setattr__(self, 'offset', int(self.offset))
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_dict(cls, coeffs: Dict[int, complex]) -> 'FourierCoeffs':
        if not coeffs:
            return cls.zero()
        modes = [int(m) for m in coeffs]
        offset = min(modes)
        values = np.zeros(max(modes) - offset + 1, dtype=complex)
        for mode, value in coeffs.items():
            values[int(mode) - offset] += value
        return cls(offset, values)

    @classmethod
    def unit(cls, mode: int, weight: complex = 1.0) -> 'FourierCoeffs':
        return cls(mode, [weight])

    @classmethod
    def zero(cls) -> 'FourierCoeffs':
        return cls(0, [0.0])

    @property
    def modes(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.values.shape[0])

    def __getitem__(self, mode: int) -> complex:
        index = mode - self.offset
        if 0 <= index < self.values.shape[0]:
            return complex(self.values[index])
        return 0j

    def as_dict(self) -> Dict[int, complex]:
        return {int(m): complex(v) for m, v in zip(self.modes, self.values) if v != 0}

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values)))

    norm = l1_norm

    def window(self, low: int, high: int) -> np.ndarray:
        """Dense coefficients on modes low..high inclusive"""
        dense = np.zeros(high - low + 1, dtype=complex)
        modes = self.modes
        inside = (modes >= low) & (modes <= high)
        dense[modes[inside] - low] = self.values[inside]
        return dense

    def _combine(self, other: 'FourierCoeffs', sign: float) -> 'FourierCoeffs':
        low = min(self.offset, other.offset)
        high = max(self.modes[-1], other.modes[-1])
        return FourierCoeffs(low, self.window(low, high) + sign * other.window(low, high))

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        return FourierCoeffs(self.offset, scalar * self.values)

    __rmul__ = __mul__

    def reflect_conjugate(self) -> 'FourierCoeffs':
        """Coefficients of the complex conjugate: conj(u(-m))"""
        return FourierCoeffs(-int(self.modes[-1]), np.conj(self.values[::-1]))

    def trim(self, threshold: Optional[float] = None) -> 'FourierCoeffs':
        threshold = settings.WIENER_PRUNE if threshold is None else threshold
        kept = np.flatnonzero(np.abs(self.values) >= threshold)
        if kept.shape[0] == 0:
            return FourierCoeffs.zero()
        return FourierCoeffs(self.offset + kept[0], self.values[kept[0]:kept[-1] + 1])


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """sum_j w_j delta_(xi_j); locations closer than the merge precision
    are one atom"""
    locations: np.ndarray
    weights: np.ndarray
    dim: int = 1

    def __post_init__(self):
        if self.dim != 1:
            raise ValidationError('only one-dimensional measures are supported')
        locations = np.atleast_1d(np.asarray(self.locations, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        if locations.shape != weights.shape or locations.ndim != 1:
            raise ValidationError('need one weight per atom')
        if not (np.all(np.isfinite(locations)) and np.all(np.isfinite(weights))):
            raise ValidationError('atoms are not finite')
        locations, weights = _merge(locations, weights)
        locations.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, 'locations', locations)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, complex]]) -> 'AtomicMeasure':
        pairs = list(pairs)
        if not pairs:
            return cls.zero()
        locations, weights = zip(*pairs)
        return cls(locations, weights)

    @classmethod
    def dirac(cls, location: float = 0.0, weight: complex = 1.0) -> 'AtomicMeasure':
        return cls([location], [weight])

    @classmethod
    def zero(cls) -> 'AtomicMeasure':
        return cls([0.0], [0.0])

    @classmethod
    def from_coeffs(cls, coeffs: FourierCoeffs) -> 'AtomicMeasure':
        """The periodic function as a measure on the integer lattice"""
        return cls(coeffs.modes.astype(float), coeffs.values)

    @property
    def size(self) -> int:
        return int(self.locations.shape[0])

    def __getitem__(self, location: float) -> complex:
        target = np.round(location, settings.WIENER_MERGE_DECIMALS)
        index = np.searchsorted(self.locations, target)
        if index < self.size and self.locations[index] == target:
            return complex(self.weights[index])
        return 0j

    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    norm = total_variation

    def __add__(self, other):
        return AtomicMeasure(np.concatenate([self.locations, other.locations]),
                             np.concatenate([self.weights, other.weights]))

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return AtomicMeasure(self.locations, scalar * self.weights)

    __rmul__ = __mul__

    def reflect_conjugate(self) -> 'AtomicMeasure':
        return AtomicMeasure(-self.locations, np.conj(self.weights))

    def prune(self, threshold: Optional[float] = None) -> 'AtomicMeasure':
        threshold = settings.WIENER_PRUNE if threshold is None else threshold
        kept = np.abs(self.weights) >= threshold
        if not np.any(kept):
            return AtomicMeasure.zero()
        return AtomicMeasure(self.locations[kept], self.weights[kept])


Coefficients = Union[FourierCoeffs, AtomicMeasure]


@dataclass(frozen=True, eq=False)
class CoeffTrajectory:
    """States at the panel ends of [0, T]; `q` is the smallness constant"""
    times: Tuple[float, ...]
    states: Tuple[Coefficients, ...]
    sup_norm_history: Tuple[float, ...] = ()
    distances: Tuple[float, ...] = ()
    q: float = 0.0
    pruned: int = 0
    flags: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if len(self.states) != len(self.times):
            raise ValidationError('trajectory needs one state per time')

    @property
    def iterations(self) -> int:
        return len(self.distances)

    @property
    def ratios(self) -> np.ndarray:
        distances = np.array(self.distances)
        if distances.shape[0] < 2:
            return np.zeros(0)
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(distances[:-1] > 0, distances[1:] / distances[:-1], 0.0)

    @property
    def final(self) -> Coefficients:
        return self.states[-1]

    def sup_norm(self) -> float:
        return max(state.norm() for state in self.states)

    def sup_distance(self, other: 'CoeffTrajectory') -> float:
        if len(other.times) != len(self.times):
            raise ValidationError('trajectories live on different time grids')
        return max((a - b).norm() for a, b in zip(self.states, other.states))

    def rows(self):
        for t, state in zip(self.times, self.states):
            support = state.values.shape[0] if isinstance(state, FourierCoeffs) else state.size
            yield t, state.norm(), support
