from django.conf import settings
from rest_framework import serializers

from grid.serializers import RunConfigSerializer
from wiener.models import AtomicMeasure, FourierCoeffs


class TriplesField(serializers.ListField):
    """JSON form of coefficients: [[mode-or-location, re, im], ...]"""

    def __init__(self, **kwargs):
        kwargs.setdefault('child', serializers.ListField(
            child=serializers.FloatField(), min_length=3, max_length=3))
        super().__init__(**kwargs)

    @staticmethod
    def coeffs(triples) -> FourierCoeffs:
        total = FourierCoeffs.zero()
        for mode, re, im in triples:
            if int(mode) != mode:
                raise serializers.ValidationError('periodic modes must be integers')
            total = total + FourierCoeffs.unit(int(mode), complex(re, im))
        return total

    @staticmethod
    def measure(triples) -> AtomicMeasure:
        return AtomicMeasure.from_pairs((xi, complex(re, im)) for xi, re, im in triples)

    @staticmethod
    def dump(state) -> list:
        if isinstance(state, FourierCoeffs):
            return [[m, v.real, v.imag] for m, v in state.as_dict().items()]
        return [[float(xi), w.real, w.imag] for xi, w in zip(state.locations, state.weights)]


class PeriodicEvolveConfigSerializer(RunConfigSerializer):
    """Defaults reproduce u0 = 0.05 e_1, mu = 0.1 e_0, rho = 2, T = 0.5"""
    DOMAINS = ('periodic', 'atomic')

    domain = serializers.ChoiceField(choices=DOMAINS, default='periodic')
    u0 = TriplesField(default=lambda: [[1, 0.05, 0.0]])
    mu = TriplesField(default=lambda: [[0, 0.1, 0.0]])
    rho = serializers.IntegerField(min_value=1, default=2)
    lambda_sign = serializers.ChoiceField(choices=[-1, 0, 1], default=1)
    T = serializers.FloatField(default=0.5)
    n_times = serializers.IntegerField(min_value=1, default=settings.WIENER_PANELS)
    order = serializers.IntegerField(min_value=1, default=settings.WIENER_GAUSS_ORDER)
    tol = serializers.FloatField(default=settings.WIENER_TOL)
    max_iters = serializers.IntegerField(min_value=1, default=settings.PICARD_MAX_ITERS)
    conjugate = serializers.BooleanField(default=False)
    reference_modes = serializers.IntegerField(min_value=0,
                                               default=settings.WIENER_GALERKIN_MODES)

    def validate_T(self, value):
        if value == 0:
            raise serializers.ValidationError('time horizon T must be nonzero')
        return value

    def validate_tol(self, value):
        if value <= 0:
            raise serializers.ValidationError('tolerance must be positive')
        return value

    def validate(self, attrs):
        if not attrs['u0']:
            raise serializers.ValidationError('u0 needs at least one coefficient')
        if attrs['conjugate'] and (attrs['rho'] < 3 or attrs['rho'] % 2 == 0):
            raise serializers.ValidationError('conjugate power requires odd ρ')
        build = TriplesField.coeffs if attrs['domain'] == 'periodic' else TriplesField.measure
        build(attrs['u0'])
        build(attrs['mu'])
        return attrs

    def build_data(self):
        """(u0, mu) in the configured domain; mu is None when empty"""
        data = self.validated_data
        build = TriplesField.coeffs if data['domain'] == 'periodic' else TriplesField.measure
        mu = build(data['mu']) if data['mu'] else None
        return build(data['u0']), mu
