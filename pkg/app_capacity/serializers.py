import math

from rest_framework import serializers

from .channel import thermal_noise_dbm
from .scenario import AreaModel, BodyModel, FleetModel, RadioModel


class ModelSectionSerializer(serializers.Serializer):
    """Coerces one scenario section; ``save()`` returns the frozen dataclass."""

    model_class = None

    def create(self, validated_data):
        return self.model_class(**validated_data)


def _float(default, **kwargs):
    return serializers.FloatField(default=default, **kwargs)


class AreaSectionSerializer(ModelSectionSerializer):
    model_class = AreaModel

    radius = _float(AreaModel.radius)
    density = _float(AreaModel.density)
    ell = _float(AreaModel.ell)


class BodySectionSerializer(ModelSectionSerializer):
    model_class = BodyModel

    h_b = _float(BodyModel.h_b)
    h_u = _float(BodyModel.h_u)
    r_b = _float(BodyModel.r_b)
    r_u = _float(BodyModel.r_u)


class NoisePowerField(serializers.FloatField):
    """Float in dBm, or ``auto`` to derive it from the bandwidth."""

    def to_internal_value(self, data):
        if isinstance(data, str) and data.strip().lower() == "auto":
            return None
        return super().to_internal_value(data)


class RadioSectionSerializer(ModelSectionSerializer):
    model_class = RadioModel

    f_c_ghz = _float(RadioModel.f_c_ghz)
    bandwidth_hz = _float(RadioModel.bandwidth_hz)
    p_a_dbm = _float(RadioModel.p_a_dbm)
    g_a_db = _float(RadioModel.g_a_db)
    g_u_db = _float(RadioModel.g_u_db)
    blockage_loss_db = _float(RadioModel.blockage_loss_db)
    gamma = _float(RadioModel.gamma)
    n0_dbm = NoisePowerField(default=RadioModel.n0_dbm)
    nf_db = _float(RadioModel.nf_db)

    def validate(self, attrs):
        if attrs.get("n0_dbm") is None:
            bandwidth = attrs["bandwidth_hz"]
            if bandwidth <= 0:
                raise serializers.ValidationError({"n0_dbm": "auto needs a positive bandwidth"})
            attrs["n0_dbm"] = thermal_noise_dbm(bandwidth)
        return attrs


class FleetSectionSerializer(ModelSectionSerializer):
    model_class = FleetModel

    n = serializers.IntegerField(default=FleetModel.n)
    h_a = _float(FleetModel.h_a)
    h_l = _float(FleetModel.h_l)
    t_h = _float(FleetModel.t_h)
    t_c_h = _float(FleetModel.t_c_h)
    nu_kmh = _float(FleetModel.nu_kmh)
    p_e = _float(FleetModel.p_e)
    p_h = _float(FleetModel.p_h)
    p_t = _float(FleetModel.p_t)
    n_max = serializers.IntegerField(default=FleetModel.n_max)


SECTION_SERIALIZERS = {
    "area": AreaSectionSerializer,
    "body": BodySectionSerializer,
    "radio": RadioSectionSerializer,
    "fleet": FleetSectionSerializer,
}


class ScenarioSerializer(serializers.Serializer):
    """Read-only nested view of a ScenarioConfig for API responses."""

    area = AreaSectionSerializer(read_only=True)
    body = BodySectionSerializer(read_only=True)
    radio = RadioSectionSerializer(read_only=True)
    fleet = FleetSectionSerializer(read_only=True)


class HeightField(serializers.Field):
    """Meters, or one of ``auto`` / ``config``."""

    default_error_messages = {"invalid": "Expected a height in meters, 'auto' or 'config'."}

    def to_internal_value(self, data):
        if isinstance(data, str) and data.strip().lower() in ("auto", "config"):
            return data.strip().lower()
        try:
            value = float(data)
        except (TypeError, ValueError):
            self.fail("invalid")
        if not math.isfinite(value):
            self.fail("invalid")
        return value

    def to_representation(self, value):
        return value


class EvaluateRequestSerializer(serializers.Serializer):
    option = serializers.ChoiceField(choices=["airborne", "landed", "both"], default="both")
    height = HeightField(default="auto")
    overrides = serializers.DictField(child=serializers.CharField(), default=dict)


class CycleResultSerializer(serializers.Serializer):
    rho = serializers.FloatField()
    t_f_h = serializers.FloatField()
    t_s_h = serializers.FloatField()
    n_serving = serializers.IntegerField()


class CapacityReportSerializer(serializers.Serializer):
    option = serializers.CharField(source="option.value")
    m_serving = serializers.IntegerField()
    mean_se = serializers.FloatField()
    network_capacity = serializers.FloatField()
    user_capacity = serializers.FloatField(allow_null=True)
    height_used = serializers.FloatField()
    provenance = serializers.CharField()
    note = serializers.CharField(allow_blank=True)
    cycle = CycleResultSerializer(allow_null=True)
