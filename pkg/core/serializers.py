"""
Serializers for API request/response validation.
"""
from rest_framework import serializers


class ComplexTextSerializer(serializers.Serializer):
    """A complex in .cux text; the last complex section is the one examined."""
    text = serializers.CharField(help_text="Text with one or more 'complex' sections")
    strict = serializers.BooleanField(required=False, allow_null=True, default=None)


class CoversRequestSerializer(serializers.Serializer):
    text = serializers.CharField()
    max_degree = serializers.IntegerField(min_value=1, max_value=8, default=3)
    regular_only = serializers.BooleanField(required=False, default=False)


class GocTextSerializer(serializers.Serializer):
    """A self-contained bundle: complexes, maps and one goc section."""
    text = serializers.CharField()
    vertex_budget = serializers.IntegerField(min_value=1, max_value=12, required=False)
    gamma_budget = serializers.IntegerField(min_value=1, required=False)


class VerifyRequestSerializer(serializers.Serializer):
    certificate = serializers.CharField()
    text = serializers.CharField(help_text="The bundle the certificate was emitted for")


class ValidationResponseSerializer(serializers.Serializer):
    complex = serializers.CharField()
    npc = serializers.BooleanField()
    cells = serializers.ListSerializer(child=serializers.IntegerField())
    violations = serializers.ListSerializer(child=serializers.DictField())


class SpecialResponseSerializer(serializers.Serializer):
    complex = serializers.CharField()
    special = serializers.BooleanField()
    pathology = serializers.CharField(allow_null=True)
    witness = serializers.CharField(allow_blank=True)
    pathologies = serializers.DictField(allow_null=True)


class HyperplaneSerializer(serializers.Serializer):
    id = serializers.CharField()
    edges = serializers.ListSerializer(child=serializers.CharField())
    two_sided = serializers.BooleanField()
    vertical = serializers.CharField(allow_null=True)


class HyperplanesResponseSerializer(serializers.Serializer):
    complex = serializers.CharField()
    hyperplanes = HyperplaneSerializer(many=True)
    crossings = serializers.ListSerializer(child=serializers.ListField(child=serializers.CharField()))
    pathologies = serializers.DictField()
    dot = serializers.CharField()


class CoverSerializer(serializers.Serializer):
    name = serializers.CharField()
    degree = serializers.IntegerField()
    regular = serializers.BooleanField()
    euler = serializers.IntegerField()
    voltages = serializers.CharField()


class CoversResponseSerializer(serializers.Serializer):
    complex = serializers.CharField()
    max_degree = serializers.IntegerField()
    covers = CoverSerializer(many=True)


class SpecializeResponseSerializer(serializers.Serializer):
    datum = serializers.CharField()
    success = serializers.BooleanField()
    transcript = serializers.ListSerializer(child=serializers.CharField())
    certificate = serializers.CharField(required=False)
    input_hash = serializers.CharField(required=False)
    gamma_degree = serializers.IntegerField(required=False)
    vertex_degree = serializers.IntegerField(required=False)
    statistics = serializers.DictField(required=False)
    inconclusive = serializers.DictField(required=False)


class VerifyResponseSerializer(serializers.Serializer):
    datum = serializers.CharField()
    valid = serializers.BooleanField()
    reason = serializers.CharField(allow_blank=True)
    statistics = serializers.DictField()


class CertificateRecordSerializer(serializers.Serializer):
    id = serializers.CharField()
    input_hash = serializers.CharField()
    datum = serializers.CharField()
    gamma_degree = serializers.IntegerField()
    vertex_degree = serializers.IntegerField()
    statistics = serializers.DictField()
    voltages = serializers.DictField()
    certificate = serializers.CharField()
    created_at = serializers.CharField()


class HealthSerializer(serializers.Serializer):
    """Serializer for health check response."""
    status = serializers.CharField()
    timestamp = serializers.CharField()
    version = serializers.CharField()
