from django.conf import settings
from rest_framework import serializers

from grid.serializers import InitialDataSerializer, RunConfigSerializer
from propagator.models import PropagatorMethod
from spectral.serializers import InteractionSerializer


class TimesField(serializers.ListField):
    child = serializers.FloatField()

    def to_internal_value(self, data):
        times = super().to_internal_value(data)
        if not times:
            raise serializers.ValidationError('at least one time is required')
        return times


class PropagateConfigSerializer(RunConfigSerializer):
    interaction = InteractionSerializer()
    initial = InitialDataSerializer(required=False, default=dict)
    times = TimesField(default=lambda: [0.7])
    method = serializers.ChoiceField(choices=PropagatorMethod.choices, required=False)
    compare = serializers.BooleanField(default=False)
    tolerance = serializers.FloatField(default=1e-4, min_value=0)

    def validate(self, attrs):
        kind = attrs['interaction']['kind']
        method = attrs.get('method')
        if method and method not in PropagatorMethod.available[kind]:
            raise serializers.ValidationError(f'{method} is not available for {kind}')
        return attrs


class DecayScanConfigSerializer(RunConfigSerializer):
    interaction = InteractionSerializer()
    initial = InitialDataSerializer(required=False, default=dict)
    times = TimesField(default=lambda: [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0])
    subtract_bound_states = serializers.BooleanField(default=False)
    pad_to = serializers.FloatField(required=False, min_value=0)
    weak_p = serializers.FloatField(default=settings.DECAY_WEAK_P)
    expected_slope = serializers.FloatField(default=-0.5)
    slope_tolerance = serializers.FloatField(default=settings.DECAY_SLOPE_TOLERANCE, min_value=0)

    def validate_times(self, value):
        if any(t <= 0 for t in value) or any(b <= a for a, b in zip(value, value[1:])):
            raise serializers.ValidationError('times must be positive and increasing')
        if len(value) < 2:
            raise serializers.ValidationError('a slope needs at least two times')
        return value
