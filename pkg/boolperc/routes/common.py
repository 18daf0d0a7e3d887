"""Helpers shared by the routers: config parsing and error translation."""
import logging
from typing import Any, Dict

from fastapi import HTTPException

from boolperc.config import ExperimentConfig, resolve_config
from boolperc.sim.errors import PercolationError, ResourceLimitError

logger = logging.getLogger(__name__)


def http_error(e: PercolationError) -> HTTPException:
    """413 for resource limits, 400 for everything the caller got wrong."""
    if isinstance(e, ResourceLimitError):
        return HTTPException(status_code=413, detail=str(e))
    return HTTPException(status_code=400, detail=str(e))


def parse_config(**values: Any) -> ExperimentConfig:
    """Validate query parameters through ExperimentConfig."""
    overrides: Dict[str, Any] = {k: v for k, v in values.items() if v is not None}
    try:
        cfg = resolve_config(None, overrides)
    except PercolationError as e:
        raise http_error(e)
    return cfg
