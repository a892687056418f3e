"""Decreasing rearrangements, weak-Lp and Lorentz norms on grids.

Every grid sample is a cell of measure h, so f* is a step function and
f**(t) = (1/t) * integral_0^t f*(s) ds is piecewise of the form
(A + a t) / t, which makes both norms computable exactly.
"""
import math

import numpy as np
from django.core.exceptions import ValidationError
from scipy.special import gamma as gamma_function

from grid.models import GridFunction
from lorentz.models import RearrangementProfile


def decreasing_rearrangement(f: GridFunction) -> RearrangementProfile:
    h = f.grid.h
    fstar = np.sort(np.abs(f.values))[::-1]
    t = h * np.arange(1, fstar.shape[0] + 1)
    fstarstar = np.cumsum(fstar) * h / t
    return RearrangementProfile(t_samples=t, fstar=fstar, fstarstar=fstarstar)


def weak_lp_norm(f: GridFunction, p: float) -> float:
    """sup_t t^(1/p) f**(t), the (p, infinity) norm built on f**.

    On the k-th cell t^(1/p) f**(t) = t^(1/p - 1) (A + a t) with A >= 0; its
    only interior critical point is a minimum, so the sup sits at cell ends.
    """
    if p <= 1:
        raise ValidationError('weak Lp norm needs p > 1')
    if math.isinf(p):
        return float(np.max(np.abs(f.values)))

    profile = decreasing_rearrangement(f)
    if profile.fstar[0] == 0:
        return 0.0
    return float(np.max(profile.t_samples ** (1.0 / p) * profile.fstarstar))


def lorentz_norm(f: GridFunction, p: float, q: float) -> float:
    """(integral (t^(1/p) f*(t))^q dt/t)^(1/q), built on f*.

    The integral is exact on the step profile; q = infinity gives
    sup_t t^(1/p) f*(t).
    """
    if p <= 0 or q <= 0:
        raise ValidationError('Lorentz norm needs p > 0 and q > 0')

    profile = decreasing_rearrangement(f)
    t = profile.t_samples
    a = profile.fstar

    if math.isinf(q):
        if math.isinf(p):
            return float(a[0])
        return float(np.max(a * t ** (1.0 / p)))

    ratio = q / p if not math.isinf(p) else 0.0
    if ratio == 0.0:
        raise ValidationError('Lorentz norm with p = infinity needs q = infinity')
    left = np.concatenate([[0.0], t[:-1]])
    cells = (t ** ratio - left ** ratio) / ratio
    total = float(np.sum(a ** q * cells))
    return total ** (1.0 / q)


def holder_constant(r: float) -> float:
    """C with ||fg||_(r,inf) <= C ||f||_(q1,inf) ||g||_(q2,inf), 1/r = 1/q1 + 1/q2.

    Follows from (fg)*(t) <= f*(t/2) g*(t/2) and f* <= f**.
    """
    if r <= 1:
        raise ValidationError('Hölder constant needs r > 1')
    return 2.0 ** (1.0 / r) * r / (r - 1.0)


def bound_state_lorentz_norm(sigma: float, p: float, q: float) -> float:
    """Closed form of the (p, q) norm of sqrt(-sigma/2) e^(sigma |x| / 2).

    Its rearrangement is sqrt(-sigma/2) e^(sigma s / 4), which turns the
    integral into a Gamma function.
    """
    if sigma >= 0:
        raise ValidationError('bound state needs sigma < 0')
    if p <= 0 or q <= 0 or math.isinf(p) or math.isinf(q):
        raise ValidationError('closed form needs finite positive p and q')
    power = ((-sigma / 2) ** (q / 2) * (-4 / (q * sigma)) ** (q / p)
             * gamma_function(q / p))
    return power ** (1 / q)
