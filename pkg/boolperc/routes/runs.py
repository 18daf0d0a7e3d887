"""Run store routes."""
from typing import List

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from boolperc.db import get_db
from boolperc.models import ExperimentRun
from boolperc.schemas import RunDetailResponse, RunResponse

router = APIRouter(prefix="/runs", tags=["runs"])


@router.get("", response_model=List[RunResponse])
def list_runs(subcommand: str = None, limit: int = 100, db: Session = Depends(get_db)):
    """Most recent runs first."""
    query = db.query(ExperimentRun)
    if subcommand:
        query = query.filter(ExperimentRun.subcommand == subcommand)
    return query.order_by(ExperimentRun.id.desc()).limit(limit).all()


@router.get("/{run_id}", response_model=RunDetailResponse)
def get_run(run_id: int, db: Session = Depends(get_db)):
    """Get a run with its config and estimate rows."""
    run = db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return run
