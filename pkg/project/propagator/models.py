from dataclasses import dataclass, field
from typing import FrozenSet

import numpy as np
from django.core.exceptions import ValidationError


class PropagatorMethod:
    CLOSED_FORM = 'closed_form'
    KERNEL = 'kernel'
    SPECTRAL = 'spectral'
    choices = [
        (CLOSED_FORM, 'Convolution formula'),
        (KERNEL, 'Kernel quadrature'),
        (SPECTRAL, 'Spectral quadrature'),
    ]

    # which methods each interaction kind supports
    available = {
        'delta': (CLOSED_FORM, KERNEL, SPECTRAL),
        'delta_prime': (KERNEL,),
        'two_delta': (KERNEL,),
    }


@dataclass(frozen=True, eq=False)
class DecayScanResult:
    times: np.ndarray
    sup_norms: np.ndarray
    weak_norms: np.ndarray
    fitted_slope: float
    slope_stderr: float
    bound_norm: float = 0.0
    flags: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0) or np.any(self.times <= 0):
            raise ValidationError('times must be positive and strictly increasing')

    def rows(self):
        return zip(self.times, self.sup_norms, self.weak_norms)
