from django.conf import settings
from rest_framework import serializers

from grid.models import Grid, GridFunction, gaussian


class GridSerializer(serializers.Serializer):
    x_min = serializers.FloatField(required=False)
    x_max = serializers.FloatField(default=settings.GRID_X_MAX)
    n = serializers.IntegerField(min_value=2, default=settings.GRID_POINTS)

    def validate(self, attrs):
        attrs.setdefault('x_min', -attrs['x_max'])
        if not attrs['x_min'] < attrs['x_max']:
            raise serializers.ValidationError('grid requires x_min < x_max')
        return attrs

    def create(self, validated_data):
        return Grid(**validated_data)


class GaussianSerializer(serializers.Serializer):
    center = serializers.FloatField(default=0.0)
    width = serializers.FloatField(default=1.0)
    amplitude = serializers.FloatField(default=1.0)

    def validate_width(self, value):
        if value <= 0:
            raise serializers.ValidationError('width must be positive')
        return value

    @staticmethod
    def build(grid: Grid, data: dict) -> GridFunction:
        return gaussian(grid, **data)


class RunConfigSerializer(serializers.Serializer):
    """Fields every command shares; commands subclass it"""
    command = serializers.CharField()
    seed = serializers.IntegerField(default=0)
    output = serializers.CharField(default='', allow_blank=True)
    grid = GridSerializer(required=False)

    def build_grid(self) -> Grid:
        data = self.validated_data.get('grid')
        if data is None:
            serializer = GridSerializer(data={})
            serializer.is_valid(raise_exception=True)
            data = serializer.validated_data
        return Grid(**data)


class InitialDataSerializer(serializers.Serializer):
    """Sum of Gaussians; the default is the left-supported e^{-(x+3)^2}"""
    gaussians = GaussianSerializer(many=True, required=False)

    @staticmethod
    def build(grid: Grid, data: dict) -> GridFunction:
        items = data.get('gaussians') or [{'center': -3.0, 'width': 1.0, 'amplitude': 1.0}]
        values = sum(GaussianSerializer.build(grid, item).values for item in items)
        return GridFunction(grid, values)


class VerifyConfigSerializer(RunConfigSerializer):
    CHECKS = ('scattering', 'spectrum', 'oracles', 'unitarity', 'decay', 'phases',
              'weak_lp', 'lorentz', 'wiener', 'orbit')

    only = serializers.ListField(child=serializers.ChoiceField(choices=CHECKS),
                                 default=lambda: list(VerifyConfigSerializer.CHECKS))
    instances = serializers.IntegerField(min_value=1, default=10000)
