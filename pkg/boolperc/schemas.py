"""Pydantic schemas for request/response validation."""
from datetime import datetime
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class EventKind(str, Enum):
    """Event kinds accepted by the estimator."""
    G = "G"
    HTILDE = "Htilde"
    H_WINDOW = "H_window"
    D_EXCEEDS = "D_exceeds"
    COVERED = "covered"


class SeriesClass(str, Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"


# Graph schemas
class GrowthRowOut(BaseModel):
    r: int
    ball: int
    sphere: int
    doubling_ratio: float


class GraphInfoResponse(BaseModel):
    """Growth table and fitted growth exponent of a model."""
    model: str
    transitive: bool
    center: List[int]
    rows: List[GrowthRowOut]
    d_hat: Optional[float] = None
    C_hat: Optional[float] = None


class BallResponse(BaseModel):
    model: str
    center: List[int]
    radius: int
    size: int
    sphere_sizes: List[int]


class NetResponse(BaseModel):
    model: str
    center: List[int]
    r: int
    sep: int
    size: int
    points: List[List[int]]


class ProfileRowOut(BaseModel):
    center: str
    r: int
    eps: float
    sep: int
    n_hat: int
    ball_size: int


class AssouadResponse(BaseModel):
    model: str
    beta_hat: float
    C1_hat: float
    r2: float
    log2_doubling: Optional[float] = None
    profile: List[ProfileRowOut]


class UploadResponse(BaseModel):
    """Response after uploading an edge-list file."""
    filename: str
    spec: str
    n_vertices: int
    message: str


# Estimate schemas
class EstimateRequest(BaseModel):
    model: str = "z:1"
    law: str = "const:1"
    kind: EventKind = EventKind.G
    p: float = Field(ge=0.0, le=1.0)
    r: int = Field(default=1, ge=1)
    window: Optional[int] = Field(default=None, ge=0)
    vertex: Optional[List[int]] = None
    replicas: int = Field(default=1000, ge=1, le=1_000_000)
    seed: int = Field(default=0, ge=0)
    confidence: float = Field(default=0.95, gt=0.0, lt=1.0)


class EstimateOut(BaseModel):
    """One Monte Carlo estimate row."""
    event_kind: str
    model: str
    p: float
    law: str
    r: int
    replicas: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    seed: int

    class Config:
        from_attributes = True


class EstimateResponse(EstimateOut):
    run_id: int
    hits: int
    confidence: float
    sigma: float


# Analysis schemas
class ConstantsOut(BaseModel):
    dim: float
    C1: float
    C2: float
    C3: float
    K: float
    source: str


class BoundsResponse(BaseModel):
    """SB1/SB2 per scale, p0 and the derived constants."""
    model: str
    law: str
    p: float
    constants: ConstantsOut
    p_zero: Optional[str] = None
    p_zero_value: Optional[float] = None
    sb1: Dict[int, float]
    sb2: Dict[int, float]


class BracketResponse(BaseModel):
    model: str
    law: str
    p: float
    r: int
    window: int
    lo: float
    hi: float


class RecursionRequest(BaseModel):
    F0: List[str] = Field(min_length=1)
    G: List[str] = Field(default_factory=list)
    threshold: float = Field(default=1e-3, gt=0.0)


class RecursionResponse(BaseModel):
    direct: List[str]
    closed: List[str]
    hypotheses_ok: bool
    bounded_by_closed: bool
    below_half: bool
    converged: bool


class CoverageResponse(BaseModel):
    model: str
    law: str
    p: float
    r: int
    classification: SeriesClass
    exact_terms: int
    partial_last: float
    windows: List[int]
    expected: List[float]
    observed: List[float]


class CensusResponse(BaseModel):
    model: str
    law: str
    p: float
    window: int
    seed: int
    n_components: int
    spanning: int
    largest: int
    histogram: Dict[int, int]


# Run store schemas
class RunResponse(BaseModel):
    """A stored run without its estimate rows."""
    id: int
    subcommand: str
    model: str
    law: str
    seed: str
    created_at: Optional[datetime] = None

    class Config:
        from_attributes = True


class RunDetailResponse(RunResponse):
    config: dict
    estimates: List[EstimateOut] = []
