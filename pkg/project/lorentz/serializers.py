from rest_framework import serializers

from grid.models import Grid
from grid.serializers import RunConfigSerializer

DEFAULT_PAIRS = ((1.0, 1.0), (2.0, 2.0), (3.0, 2.0))
# the step model of f* needs a fine grid for the 5e-3 agreement
DEFAULT_GRID = (40.0, 40001)


class LorentzNormConfigSerializer(RunConfigSerializer):
    """(p, q) norms of the delta bound state against the Gamma formula"""
    sigma = serializers.FloatField(default=-2.0)
    pairs = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(min_value=0.0),
                                    min_length=2, max_length=2),
        default=lambda: [list(pair) for pair in DEFAULT_PAIRS])
    weak_p = serializers.FloatField(default=2.0)
    tolerance = serializers.FloatField(default=5e-3)
    refine = serializers.BooleanField(default=True)

    def validate_sigma(self, value):
        if value >= 0:
            raise serializers.ValidationError('bound state needs sigma < 0')
        return value

    def validate_pairs(self, value):
        if not value or any(p <= 0 or q <= 0 for p, q in value):
            raise serializers.ValidationError('need positive (p, q) pairs')
        return value

    def validate_weak_p(self, value):
        if value <= 1:
            raise serializers.ValidationError('weak Lp norm needs p > 1')
        return value

    def build_grid(self) -> Grid:
        if self.validated_data.get('grid') is None:
            return Grid.from_extent(*DEFAULT_GRID)
        return super().build_grid()
