from django.core.exceptions import ValidationError
from rest_framework import serializers

from grid.serializers import RunConfigSerializer
from spectral.models import Delta, DeltaPrime, PointInteraction, TwoDelta

PARAMETERS = {
    Delta.kind: ('sigma',),
    DeltaPrime.kind: ('beta',),
    TwoDelta.kind: ('alpha', 'a'),
}


class InteractionSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=list(PARAMETERS))
    sigma = serializers.FloatField(required=False)
    beta = serializers.FloatField(required=False)
    alpha = serializers.FloatField(required=False)
    a = serializers.FloatField(required=False)

    def validate(self, attrs):
        missing = [name for name in PARAMETERS[attrs['kind']] if name not in attrs]
        if missing:
            raise serializers.ValidationError(
                f'{attrs["kind"]} needs {", ".join(missing)}')
        try:
            self.create(attrs)
        except ValidationError as exc:
            raise serializers.ValidationError(exc.messages) from exc
        return {key: attrs[key] for key in ('kind',) + PARAMETERS[attrs['kind']]}

    def create(self, validated_data) -> PointInteraction:
        data = dict(validated_data)
        kind = data.pop('kind')
        if kind == Delta.kind:
            return Delta(data['sigma'])
        if kind == DeltaPrime.kind:
            return DeltaPrime(data['beta'])
        return TwoDelta(data['alpha'], data['a'])


class SweepSerializer(serializers.Serializer):
    a_min = serializers.FloatField()
    a_max = serializers.FloatField()
    points = serializers.IntegerField(min_value=2, default=50)

    def validate(self, attrs):
        if not 0 < attrs['a_min'] < attrs['a_max']:
            raise serializers.ValidationError('sweep requires 0 < a_min < a_max')
        return attrs


class SpectrumConfigSerializer(RunConfigSerializer):
    interaction = InteractionSerializer()
    sweep = SweepSerializer(required=False)

    def validate(self, attrs):
        if 'sweep' in attrs and attrs['interaction']['kind'] != TwoDelta.kind:
            raise serializers.ValidationError('sweep applies to two_delta only')
        return attrs


def build_interaction(data: dict) -> PointInteraction:
    return InteractionSerializer().create(data)
