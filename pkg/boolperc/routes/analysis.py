"""Analytic bounds, the H bracket, the F/G recursion, coverage and cluster census."""
import logging
from fractions import Fraction
from typing import Optional

import numpy as np
from fastapi import APIRouter

from boolperc.routes.common import http_error, parse_config
from boolperc.schemas import (
    BoundsResponse,
    BracketResponse,
    CensusResponse,
    ConstantsOut,
    CoverageResponse,
    RecursionRequest,
    RecursionResponse,
)
from boolperc.sim.bounds import bound_SB1, bound_SB2, coverage_series, p_zero, prob_H_bracket, recursion_check
from boolperc.sim.checks import cluster_census, coverage_fraction_of, expected_coverage
from boolperc.sim.errors import ConfigError, InfiniteMomentError, PercolationError
from boolperc.sim.sampler import ProcessSpec, replica_seed, sample_window

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/analysis", tags=["analysis"])


@router.get("/bounds", response_model=BoundsResponse)
def bounds(
    model: str = "z:1",
    law: str = "const:1",
    p: float = 0.01,
    radii: str = "1,2,4",
    dim: Optional[float] = None,
    c1: Optional[float] = None,
):
    """SB1 and SB2 at each scale, p0 and the constants K, C2, C3."""
    cfg = parse_config(model=model, law=law, p=[p], r=radii, dim=dim, c1=c1)
    try:
        m = cfg.build_model()
        radius_law = cfg.build_law()
        constants = cfg.build_constants(m)
        sb1 = {r: float(bound_SB1(constants, p, r)) for r in cfg.r}
        sb2 = {r: float(bound_SB2(constants, p, radius_law, r)) for r in cfg.r}
    except PercolationError as e:
        raise http_error(e)
    try:
        p0 = p_zero(constants, radius_law)
        p0_text, p0_value = str(p0), float(p0)
    except InfiniteMomentError:
        p0_text = p0_value = None
    return BoundsResponse(
        model=m.spec(),
        law=radius_law.spec(),
        p=p,
        constants=ConstantsOut(**constants.as_dict()),
        p_zero=p0_text,
        p_zero_value=p0_value,
        sb1=sb1,
        sb2=sb2,
    )


@router.get("/h-bracket", response_model=BracketResponse)
def h_bracket(
    model: str = "z:1",
    law: str = "geom:0.5",
    p: float = 0.1,
    r: int = 1,
    window: int = 200,
    vertex: Optional[str] = None,
    dim: Optional[float] = None,
    c1: Optional[float] = None,
):
    cfg = parse_config(model=model, law=law, p=[p], r=[r], window=window, vertex=vertex, dim=dim, c1=c1)
    try:
        m = cfg.build_model()
        radius_law = cfg.build_law()
        lo, hi = prob_H_bracket(m, cfg.center(m), r, p, radius_law, window, cfg.build_constants(m))
    except PercolationError as e:
        raise http_error(e)
    return BracketResponse(model=m.spec(), law=radius_law.spec(), p=p, r=r, window=window, lo=lo, hi=hi)


@router.post("/recursion", response_model=RecursionResponse)
def recursion(request: RecursionRequest):
    """Exact-arithmetic iteration of F_n = F_{n-1}^2 + G_{n-1}; inputs are rationals like '1/8'."""
    try:
        F0 = [Fraction(x) for x in request.F0]
        G = [Fraction(x) for x in request.G]
    except (ValueError, ZeroDivisionError):
        raise http_error(ConfigError("F0 and G must be rationals such as '1/8' or '0.25'"))
    try:
        report = recursion_check(F0, G, request.threshold)
    except PercolationError as e:
        raise http_error(e)
    return RecursionResponse(
        direct=[str(x) for x in report.direct],
        closed=[str(x) for x in report.closed],
        hypotheses_ok=report.hypotheses_ok,
        bounded_by_closed=report.bounded_by_closed,
        below_half=report.below_half,
        converged=report.converged,
    )


@router.get("/coverage", response_model=CoverageResponse)
def coverage(
    model: str = "z:1",
    law: str = "zeta:1",
    p: float = 0.05,
    r: int = 0,
    windows: str = "100,1000",
    terms: int = 1000,
    samples: int = 1,
    seed: int = 0,
):
    """Divergence classification of the coverage series with expected and observed covered fractions."""
    cfg = parse_config(model=model, law=law, p=[p], r=[r], windows=windows, terms=terms, samples=samples, seed=seed)
    try:
        m = cfg.build_model()
        radius_law = cfg.build_law()
        center = m.origin()
        series = coverage_series(m, center, r, radius_law, p, cfg.terms, cfg.build_constants(m))
        expected, observed = [], []
        for L in cfg.windows:
            expected.append(expected_coverage(m, L, p, radius_law, o=center))
            fractions = [
                coverage_fraction_of(sample_window(m, center, L, ProcessSpec(p=p, law=radius_law, seed=replica_seed(seed, k))))
                for k in range(cfg.samples)
            ]
            observed.append(float(np.mean(fractions)))
    except PercolationError as e:
        raise http_error(e)
    return CoverageResponse(
        model=m.spec(),
        law=radius_law.spec(),
        p=p,
        r=r,
        classification=series.classification,
        exact_terms=series.exact_terms,
        partial_last=float(series.partial[-1]),
        windows=cfg.windows,
        expected=expected,
        observed=observed,
    )


@router.get("/census", response_model=CensusResponse)
def census(model: str = "z:2", law: str = "const:1", p: float = 0.3, window: int = 20, seed: int = 0):
    """Component-size histogram of the window graph of one sampled configuration."""
    cfg = parse_config(model=model, law=law, p=[p], window=window, seed=seed)
    try:
        m = cfg.build_model()
        radius_law = cfg.build_law()
        config = sample_window(m, m.origin(), window, ProcessSpec(p=p, law=radius_law, seed=seed))
        result = cluster_census(config)
    except PercolationError as e:
        raise http_error(e)
    return CensusResponse(
        model=m.spec(),
        law=radius_law.spec(),
        p=p,
        window=window,
        seed=seed,
        n_components=result.n_components,
        spanning=result.spanning,
        largest=result.largest,
        histogram=result.histogram,
    )
