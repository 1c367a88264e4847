from typing import Optional

from fastapi import APIRouter, Query

from workbench.models.documents import DiagramRequest
from workbench.models.reports import Report
from workbench.services.io_service import bundled_reference
from workbench.services.workbench_service import workbench_service

router = APIRouter()


@router.get("/pn", response_model=Report)
def projective_twist(
    n: int = Query(..., ge=1, le=6),
    twist: int = Query(...),
    low: Optional[int] = Query(None),
    high: Optional[int] = Query(None),
):
    """dim H^i(P^n, O(d)) for d = twist, or for every d in [low, high]"""
    window = range(low, high + 1) if low is not None and high is not None else None
    return workbench_service.cohomology_pn(n, twist, window)


@router.post("/diagram", response_model=Report)
def diagram_cohomology(request: DiagramRequest):
    return workbench_service.cohomology_diagram(
        bundled_reference(request.space), bundled_reference(request.diagram)
    )
