"""Point interactions and their spectral data"""
from dataclasses import dataclass, field
from typing import Callable, FrozenSet

import numpy as np
from django.core.exceptions import ValidationError


class PointInteraction:
    """Base for the three singular perturbations of -d^2/dx^2"""
    kind = ''

    @property
    def attractive(self) -> bool:
        raise NotImplementedError

    def as_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Delta(PointInteraction):
    """Jump condition psi'(0+) - psi'(0-) = sigma psi(0)"""
    sigma: float
    kind = 'delta'

    @property
    def attractive(self) -> bool:
        return self.sigma < 0

    def as_dict(self) -> dict:
        return {'kind': self.kind, 'sigma': self.sigma}


@dataclass(frozen=True)
class DeltaPrime(PointInteraction):
    """psi' continuous at 0, psi(0+) - psi(0-) = beta psi'(0)"""
    beta: float
    kind = 'delta_prime'

    @property
    def attractive(self) -> bool:
        return self.beta < 0

    def as_dict(self) -> dict:
        return {'kind': self.kind, 'beta': self.beta}


@dataclass(frozen=True)
class TwoDelta(PointInteraction):
    """Two delta interactions of strength alpha at x = -a and x = a"""
    alpha: float
    a: float
    kind = 'two_delta'

    def __post_init__(self):
        if self.a <= 0:
            raise ValidationError('two-delta separation a must be positive')

    @property
    def on_excluded_line(self) -> bool:
        return abs(self.a * self.alpha + 1.0) < 1e-12

    def require_regular(self) -> None:
        """The propagator is only built off the line a * alpha = -1"""
        if self.on_excluded_line:
            raise ValidationError('excluded parameter line a * alpha = -1')

    @property
    def attractive(self) -> bool:
        return self.alpha < 0

    def as_dict(self) -> dict:
        return {'kind': self.kind, 'alpha': self.alpha, 'a': self.a}


@dataclass(frozen=True)
class BoundState:
    gamma: float
    eigenfunction: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    label: int = 1

    def __post_init__(self):
        if not self.gamma < 0:
            raise ValidationError('bound state energy must be negative')

    def __call__(self, x) -> np.ndarray:
        return self.eigenfunction(np.asarray(x, dtype=float))

    def phase(self, t: float) -> complex:
        """e^{-i gamma t}, the time factor of the eigen-term"""
        return complex(np.exp(-1j * self.gamma * t))


@dataclass(frozen=True)
class ScatteringData:
    lam: float
    t_coeff: complex
    r_coeff: complex


@dataclass(frozen=True, eq=False)
class SpectralTransform:
    lambdas: np.ndarray
    values: np.ndarray
    flags: FrozenSet[str] = field(default_factory=frozenset)
