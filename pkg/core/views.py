"""
API Views mirroring the cubex command.
"""
import logging
from datetime import datetime
from django.conf import settings

from rest_framework import status
from rest_framework.decorators import api_view
from rest_framework.response import Response
from drf_spectacular.utils import extend_schema

from .budgets import Budgets
from .exceptions import CubexError
from .graphs import GocDatum
from .services import CertificateService, ComplexService, PipelineService
from .serializers import (
    ComplexTextSerializer,
    CoversRequestSerializer,
    CoversResponseSerializer,
    GocTextSerializer,
    VerifyRequestSerializer,
    ValidationResponseSerializer,
    SpecialResponseSerializer,
    HyperplanesResponseSerializer,
    SpecializeResponseSerializer,
    VerifyResponseSerializer,
    CertificateRecordSerializer,
    HealthSerializer,
)


logger = logging.getLogger(__name__)


def _bad_request(serializer):
    return Response({"success": False, "errors": serializer.errors}, status=status.HTTP_400_BAD_REQUEST)


def _input_error(e: CubexError):
    return Response({"success": False, "error": str(e)}, status=status.HTTP_400_BAD_REQUEST)


def _server_error(message: str):
    logger.exception(message)
    return Response({"success": False, "error": "Internal server error"}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)


def _goc_from_text(text: str) -> GocDatum:
    workspace = ComplexService.load_text(text)
    return workspace.goc(workspace.primary("<text>", "goc"))


# --- Health Endpoints ---

@extend_schema(
    tags=["Health"],
    summary="Health Check",
    description="Basic health check endpoint",
    responses={200: HealthSerializer},
)
@api_view(["GET"])
def health_check(request, subpath=None):
    """Health check endpoints (basic, detailed)."""
    data = {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "version": "1.0.0",
    }

    if subpath == "detailed":
        data.update({
            "database": "connected",
            "budgets": Budgets.from_settings().to_dict(),
            "environment": "production" if not settings.DEBUG else "development",
        })

    return Response(data)


# --- Complex Endpoints ---

@extend_schema(
    tags=["Complexes"],
    summary="Validate Complex",
    description="Check the link condition at every vertex",
    request=ComplexTextSerializer,
    responses={200: ValidationResponseSerializer},
)
@api_view(["POST"])
def validate_complex(request):
    serializer = ComplexTextSerializer(data=request.data)
    if not serializer.is_valid():
        return _bad_request(serializer)
    try:
        c = ComplexService.complex_from_text(serializer.validated_data["text"])
        return Response(ComplexService.validate(c))
    except CubexError as e:
        return _input_error(e)
    except Exception:
        return _server_error("Failed to validate complex")


@extend_schema(
    tags=["Complexes"],
    summary="Specialness Verdict",
    description="Decide specialness and report the first witness of each pathology",
    request=ComplexTextSerializer,
    responses={200: SpecialResponseSerializer},
)
@api_view(["POST"])
def special_complex(request):
    serializer = ComplexTextSerializer(data=request.data)
    if not serializer.is_valid():
        return _bad_request(serializer)
    try:
        data = serializer.validated_data
        c = ComplexService.complex_from_text(data["text"])
        return Response(ComplexService.special(c, data.get("strict")))
    except CubexError as e:
        return _input_error(e)
    except Exception:
        return _server_error("Failed to check specialness")


@extend_schema(
    tags=["Complexes"],
    summary="Hyperplanes",
    description="Hyperplanes, crossing pairs, pathologies and a DOT rendering",
    request=ComplexTextSerializer,
    responses={200: HyperplanesResponseSerializer},
)
@api_view(["POST"])
def hyperplanes(request):
    serializer = ComplexTextSerializer(data=request.data)
    if not serializer.is_valid():
        return _bad_request(serializer)
    try:
        data = serializer.validated_data
        c = ComplexService.complex_from_text(data["text"])
        return Response(ComplexService.hyperplanes(c, data.get("strict")))
    except CubexError as e:
        return _input_error(e)
    except Exception:
        return _server_error("Failed to compute hyperplanes")


@extend_schema(
    tags=["Covers"],
    summary="Enumerate Covers",
    description="Connected covers up to the given degree, one per isomorphism class, as voltage tables",
    request=CoversRequestSerializer,
    responses={200: CoversResponseSerializer},
)
@api_view(["POST"])
def covers(request):
    serializer = CoversRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return _bad_request(serializer)
    try:
        data = serializer.validated_data
        c = ComplexService.complex_from_text(data["text"])
        return Response(ComplexService.covers(c, data["max_degree"], data.get("regular_only", False)))
    except CubexError as e:
        return _input_error(e)
    except Exception:
        return _server_error("Failed to enumerate covers")


# --- Pipeline Endpoints ---

@extend_schema(
    tags=["Pipeline"],
    summary="Specialize",
    description="Run the specialization pipeline; an emitted certificate is stored in the registry",
    request=GocTextSerializer,
    responses={200: SpecializeResponseSerializer, 201: SpecializeResponseSerializer},
)
@api_view(["POST"])
def specialize(request):
    serializer = GocTextSerializer(data=request.data)
    if not serializer.is_valid():
        return _bad_request(serializer)
    try:
        data = serializer.validated_data
        datum = _goc_from_text(data["text"])
        budgets = Budgets.from_settings().with_overrides(
            vertex=data.get("vertex_budget"), gamma=data.get("gamma_budget")
        )
        run = PipelineService.specialize(datum, budgets)
        result = PipelineService.summarize(run)
        if run.certificate is None:
            return Response(result)
        record = CertificateService.record(run.certificate, data["text"])
        result["record_id"] = str(record.id)
        return Response(result, status=status.HTTP_201_CREATED)
    except CubexError as e:
        return _input_error(e)
    except Exception:
        return _server_error("Failed to specialize")


@extend_schema(
    tags=["Certificates"],
    summary="Verify Certificate",
    description="Rebuild the certified cover and scan it again",
    request=VerifyRequestSerializer,
    responses={200: VerifyResponseSerializer},
)
@api_view(["POST"])
def verify_certificate(request):
    serializer = VerifyRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return _bad_request(serializer)
    try:
        data = serializer.validated_data
        datum = _goc_from_text(data["text"])
        return Response(PipelineService.verify(data["certificate"], datum))
    except CubexError as e:
        return _input_error(e)
    except Exception:
        return _server_error("Failed to verify certificate")


@extend_schema(
    tags=["Certificates"],
    summary="Get Certificate",
    description="Latest stored certificate for an input hash",
    responses={200: CertificateRecordSerializer},
)
@api_view(["GET"])
def get_certificate(request, input_hash):
    try:
        return Response(CertificateService.get(input_hash))
    except ValueError as e:
        return Response({"error": str(e)}, status=status.HTTP_404_NOT_FOUND)
