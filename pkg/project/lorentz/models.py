from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class RearrangementProfile:
    """Step model of f*: value fstar[k] on (t_samples[k-1], t_samples[k]].

    fstarstar[k] is the running average f** at t_samples[k].
    """
    t_samples: np.ndarray
    fstar: np.ndarray
    fstarstar: np.ndarray

    @property
    def cell(self) -> float:
        return float(self.t_samples[0])

    def fstar_at(self, t) -> np.ndarray:
        """Evaluate the step function f* at arbitrary t > 0"""
        index = np.ceil(np.asarray(t, dtype=float) / self.cell).astype(int) - 1
        index = np.clip(index, 0, None)
        values = np.zeros(index.shape)
        inside = index < self.fstar.shape[0]
        values[inside] = self.fstar[index[inside]]
        return values
