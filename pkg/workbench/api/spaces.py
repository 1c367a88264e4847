from typing import List

import structlog
from fastapi import APIRouter

from workbench.models.documents import CentreRequest, SpaceRequest
from workbench.models.reports import Report
from workbench.services.io_service import bundled_names, bundled_reference
from workbench.services.workbench_service import workbench_service

logger = structlog.get_logger(__name__)

router = APIRouter()


@router.get("/examples", response_model=List[str])
def list_examples():
    """Names of the bundled example documents"""
    return bundled_names()


@router.post("/validate", response_model=Report)
def validate_space(request: SpaceRequest):
    """Certificate status per cover and every functoriality square"""
    return workbench_service.validate(bundled_reference(request.space))


@router.post("/schematic", response_model=Report)
def check_schematic(request: SpaceRequest):
    return workbench_service.schematic(bundled_reference(request.space))


@router.post("/centre", response_model=Report)
def centre(request: CentreRequest):
    """Centre of the point (prime at carrier); primality is taken on trust"""
    report = workbench_service.centre(
        bundled_reference(request.space), request.at, ", ".join(request.prime)
    )
    logger.info("centre computed", at=request.at, centre=str(report.data["centre"]))
    return report


@router.post("/affine", response_model=Report)
def affine(request: SpaceRequest):
    return workbench_service.affine(bundled_reference(request.space))
