"""Monte Carlo event estimates; every estimate is stored in the run store."""
import logging

from fastapi import APIRouter, Depends
from sqlalchemy.orm import Session

from boolperc.db import get_db
from boolperc.models import record_run
from boolperc.routes.common import http_error, parse_config
from boolperc.schemas import EstimateRequest, EstimateResponse
from boolperc.sim.errors import PercolationError
from boolperc.sim.estimators import EventDescriptor, mc_estimate
from boolperc.sim.sampler import ProcessSpec

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/events", tags=["events"])


@router.post("/estimate", response_model=EstimateResponse)
def estimate_event(request: EstimateRequest, db: Session = Depends(get_db)):
    """
    Estimate P(kind(v, r)) over independent replicas with a Wilson interval.
    Identical requests return identical estimates.
    """
    cfg = parse_config(
        model=request.model,
        law=request.law,
        p=[request.p],
        r=[request.r],
        window=request.window,
        replicas=request.replicas,
        seed=request.seed,
        confidence=request.confidence,
    )
    try:
        model = cfg.build_model()
        center = tuple(request.vertex) if request.vertex is not None else model.origin()
        event = EventDescriptor(request.kind.value, center, request.r, request.window)
        spec = ProcessSpec(p=request.p, law=cfg.build_law(), seed=request.seed)
        estimate = mc_estimate(model, spec, event, request.replicas, confidence=request.confidence)
    except PercolationError as e:
        raise http_error(e)

    row = estimate.as_row()
    run = record_run(db, "estimate", cfg.echo(), [row])
    return EstimateResponse(
        **row,
        run_id=run.id,
        hits=estimate.hits,
        confidence=estimate.confidence,
        sigma=estimate.sigma,
    )
