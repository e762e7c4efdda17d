import logging

from django.conf import settings
from rest_framework import status
from rest_framework.decorators import api_view
from rest_framework.response import Response

from .capacity import evaluate as evaluate_option
from .exceptions import (
    CapacityDomainError,
    ConfigParseError,
    ConfigValidationError,
    InfeasibleCycleError,
    UnsupportedCountError,
)
from .geometry import DeploymentOption
from .scenario import ScenarioConfig, load_config
from .serializers import CapacityReportSerializer, EvaluateRequestSerializer, ScenarioSerializer

logger = logging.getLogger("app_capacity")


def selected_options(choice):
    """``both`` expands to airborne then landed."""
    if choice == "both":
        return [DeploymentOption.AIRBORNE, DeploymentOption.LANDED]
    return [DeploymentOption.parse(choice)]


@api_view(["GET"])
def health_check(request):
    return Response({"status": "ok", "message": "Capacity service is working"})


@api_view(["GET"])
def scenario_defaults(request):
    """Built-in scenario defaults, section by section."""
    return Response(ScenarioSerializer(ScenarioConfig()).data)


@api_view(["POST"])
def evaluate(request):
    """
    Evaluate airborne and/or landed capacity for a scenario

    The scenario starts from the configured default file (or the built-in
    defaults) and applies ``overrides``, a mapping of dotted keys to values.

    Returns:
    - 200 OK: list of capacity reports, one per option
    - 400 Bad Request: malformed request or invalid scenario
    - 422 Unprocessable Entity: the operation cycle is infeasible (ℓ ≥ Tν/2)

    Example request body:
    {
        "option": "both",
        "height": "auto",
        "overrides": {"area.ell": "2000", "fleet.t_h": "1.5"}
    }
    """
    serializer = EvaluateRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data

    try:
        config = load_config(settings.UAVCAP["DEFAULT_CONFIG"] or None, data["overrides"])
    except ConfigValidationError as e:
        infeasible = all("infeasible cycle" in v.rule for v in e.violations)
        return Response(
            {"detail": "infeasible scenario" if infeasible else "invalid scenario", "violations": [str(v) for v in e.violations]},
            status=status.HTTP_422_UNPROCESSABLE_ENTITY if infeasible else status.HTTP_400_BAD_REQUEST,
        )
    except ConfigParseError as e:
        return Response({"detail": str(e)}, status=status.HTTP_400_BAD_REQUEST)

    reports = []
    try:
        for option in selected_options(data["option"]):
            reports.append(evaluate_option(option, config, data["height"], settings.UAVCAP["HEIGHT_RANGE_M"]))
    except InfeasibleCycleError as e:
        return Response({"detail": str(e), "bound_m": e.bound_m}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)
    except (CapacityDomainError, UnsupportedCountError) as e:
        logger.warning(f"evaluate request rejected: {e}")
        return Response({"detail": str(e)}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)

    return Response(CapacityReportSerializer(reports, many=True).data)
