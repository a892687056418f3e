import numpy as np
from django.conf import settings
from rest_framework import serializers

from grid.serializers import GaussianSerializer, InitialDataSerializer, RunConfigSerializer
from nls.models import SolverParams

ORBIT_TIMES = (1.0, 2.0, 4.0, 8.0, 16.0)


class OrbitSerializer(serializers.Serializer):
    p = serializers.FloatField(default=1.0, min_value=1.0, max_value=2.0)
    times = serializers.ListField(child=serializers.FloatField(min_value=0.0),
                                  default=lambda: list(ORBIT_TIMES))
    pad_to = serializers.FloatField(required=False, min_value=0)

    def validate_times(self, value):
        if len(value) < 2 or any(t <= 0 for t in value) or any(
                b <= a for a, b in zip(value, value[1:])):
            raise serializers.ValidationError('need at least two positive increasing times')
        return value


class EvolveConfigSerializer(RunConfigSerializer):
    DIAGNOSTICS = ('picard', 'orbit')

    diagnostic = serializers.ChoiceField(choices=DIAGNOSTICS, default='picard')
    sigma = serializers.FloatField(default=1.0)
    rho = serializers.FloatField(default=5.0)
    lambda_sign = serializers.ChoiceField(choices=[-1, 0, 1], default=1)
    eps = serializers.FloatField(required=False)
    target_budget = serializers.FloatField(required=False)
    t_min = serializers.FloatField(default=settings.NLS_T_MIN)
    t_max = serializers.FloatField(default=settings.NLS_T_MAX)
    n_times = serializers.IntegerField(default=settings.NLS_TIMES, min_value=1)
    s_quad_points = serializers.IntegerField(default=settings.DUHAMEL_QUAD_POINTS, min_value=1)
    max_iters = serializers.IntegerField(default=settings.PICARD_MAX_ITERS, min_value=1)
    tol = serializers.FloatField(default=settings.PICARD_TOL)
    initial = InitialDataSerializer(required=False, default=dict)
    perturbation = GaussianSerializer(required=False)
    orbit = OrbitSerializer(required=False, default=dict)

    def validate(self, attrs):
        if attrs['diagnostic'] == 'orbit':
            if attrs['sigma'] >= 0:
                raise serializers.ValidationError('orbit diagnostic needs sigma < 0')
            return attrs
        if attrs['sigma'] < 0:
            raise serializers.ValidationError('nonlinear solver needs sigma >= 0')
        if not 0 < attrs['t_min'] <= attrs['t_max']:
            raise serializers.ValidationError('time grid needs 0 < t_min <= t_max')
        if attrs.get('eps') is not None and attrs.get('target_budget') is not None:
            raise serializers.ValidationError('give eps or target_budget, not both')
        if attrs.get('eps') is None and attrs.get('target_budget') is None:
            attrs['target_budget'] = settings.NLS_TARGET_BUDGET
        return attrs

    def build_params(self, eps=None) -> SolverParams:
        data = self.validated_data
        if data['n_times'] == 1:
            times = [data['t_max']]
        else:
            times = np.geomspace(data['t_min'], data['t_max'], data['n_times'])
        return SolverParams(rho=data['rho'], eps=eps or data.get('eps') or 1.0,
                            times=tuple(times), sigma=data['sigma'],
                            lambda_sign=data['lambda_sign'],
                            s_quad_points=data['s_quad_points'],
                            max_iters=data['max_iters'], tol=data['tol'])
