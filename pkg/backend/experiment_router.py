# backend/experiment_router.py
from typing import List, Optional

from fastapi import APIRouter, Depends, HTTPException, Request
from slowapi import Limiter
from slowapi.util import get_remote_address
from sqlalchemy.orm import Session

from config import get_settings
from db import get_db
from errors import MetricDimensionError
from experiment_service import get_report, list_reports, run_experiment, store_report
from graph_router import raise_http
from report_schema import ExperimentReport, ExperimentRequest, ExperimentSummary

router = APIRouter(tags=["experiments"])
settings = get_settings()
limiter = Limiter(key_func=get_remote_address)


@router.post("/experiments", response_model=ExperimentReport)
@limiter.limit(settings.SOLVE_RATE_LIMIT)
async def create_experiment(request: Request, body: ExperimentRequest, db: Session = Depends(get_db)):
    try:
        report = run_experiment(body.name, body.params, body.seed)
    except MetricDimensionError as e:
        raise_http(e)
    if body.store:
        report = store_report(db, report)
    return report


@router.get("/experiments", response_model=List[ExperimentSummary])
async def experiments(name: Optional[str] = None, db: Session = Depends(get_db)):
    return list_reports(db, name)


@router.get("/experiments/{report_id}", response_model=ExperimentReport)
async def experiment(report_id: int, db: Session = Depends(get_db)):
    report = get_report(db, report_id)
    if report is None:
        raise HTTPException(status_code=404, detail=f"experiment report {report_id} not found")
    return report
