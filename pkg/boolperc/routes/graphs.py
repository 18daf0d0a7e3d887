"""Graph model routes: growth, balls, nets, covering profiles and edge-list upload."""
import logging
import re
from typing import Optional

from fastapi import APIRouter, File, HTTPException, UploadFile

from boolperc.config import get_storage_dir
from boolperc.routes.common import http_error, parse_config
from boolperc.schemas import (
    AssouadResponse,
    BallResponse,
    GraphInfoResponse,
    GrowthRowOut,
    NetResponse,
    ProfileRowOut,
    UploadResponse,
)
from boolperc.sim.errors import DegenerateFitError, PercolationError
from boolperc.sim.geometry import assouad_fit, covering_profile, growth_exponent, growth_table, separated_net
from boolperc.sim.graphs import LoadedGraph, ball, load_graph

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/graphs", tags=["graphs"])


@router.get("/info", response_model=GraphInfoResponse)
def graph_info(model: str = "z:1", radii: str = "1,2,4,8", vertex: Optional[str] = None):
    """Growth table of B(v, r) over the given radii, with a log-log growth fit."""
    cfg = parse_config(model=model, r=radii, vertex=vertex)
    try:
        m = cfg.build_model()
        center = cfg.center(m)
        table = growth_table(m, center, cfg.r)
    except PercolationError as e:
        raise http_error(e)
    try:
        fit = growth_exponent(table)
        d_hat, C_hat = fit.d_hat, fit.C_hat
    except DegenerateFitError:
        d_hat = C_hat = None
    return GraphInfoResponse(
        model=m.spec(),
        transitive=m.transitive,
        center=list(center),
        rows=[GrowthRowOut(**row) for row in table.to_dict(orient="records")],
        d_hat=d_hat,
        C_hat=C_hat,
    )


@router.get("/ball", response_model=BallResponse)
def graph_ball(model: str = "z:1", r: int = 1, vertex: Optional[str] = None):
    cfg = parse_config(model=model, r=r, vertex=vertex)
    try:
        m = cfg.build_model()
        center = cfg.center(m)
        view = ball(m, center, cfg.r[0])
    except PercolationError as e:
        raise http_error(e)
    return BallResponse(
        model=m.spec(),
        center=list(center),
        radius=view.radius,
        size=len(view),
        sphere_sizes=[int(x) for x in view.sphere_sizes],
    )


@router.get("/net", response_model=NetResponse)
def graph_net(model: str = "z:1", r: int = 4, sep: int = 2, vertex: Optional[str] = None):
    """Greedy sep-separated net of B(v, r) in canonical vertex order."""
    cfg = parse_config(model=model, r=r, sep=sep, vertex=vertex)
    try:
        m = cfg.build_model()
        center = cfg.center(m)
        net = separated_net(m, ball(m, center, cfg.r[0]).coords, cfg.sep)
    except PercolationError as e:
        raise http_error(e)
    return NetResponse(
        model=m.spec(),
        center=list(center),
        r=cfg.r[0],
        sep=cfg.sep,
        size=len(net),
        points=[list(v.coords) for v in net],
    )


@router.get("/assouad", response_model=AssouadResponse)
def graph_assouad(
    model: str = "z:1",
    radii: str = "4,8,16",
    eps: str = "1/2,1/4,1/8",
    samples: int = 1,
    seed: int = 0,
    vertex: Optional[str] = None,
):
    """Covering profile and the fitted Assouad exponent."""
    cfg = parse_config(model=model, r=radii, eps=eps, samples=samples, seed=seed, vertex=vertex)
    try:
        m = cfg.build_model()
        v = None if vertex is None and isinstance(m, LoadedGraph) else cfg.center(m)
        profile = covering_profile(m, v, cfg.r, cfg.eps_fractions(), samples=cfg.samples, seed=cfg.seed)
        fit = assouad_fit(profile)
    except PercolationError as e:
        raise http_error(e)
    return AssouadResponse(
        model=m.spec(),
        beta_hat=fit.beta_hat,
        C1_hat=fit.C1_hat,
        r2=fit.r2,
        log2_doubling=fit.log2_doubling,
        profile=[ProfileRowOut(**row) for row in profile.to_dict(orient="records")],
    )


@router.post("/upload", response_model=UploadResponse)
async def upload_graph(file: UploadFile = File(...)):
    """
    Upload an edge list (`u v [w]` per line). The file is stored under
    PERC_STORAGE and validated by loading it; the returned spec can be used
    as the `model` of any other request.
    """
    if not file.filename:
        raise HTTPException(status_code=400, detail="Missing filename")

    upload_dir = get_storage_dir()
    upload_dir.mkdir(parents=True, exist_ok=True)

    safe_filename = re.sub(r'[^a-zA-Z0-9_\-\.]', '_', file.filename)
    file_path = upload_dir / safe_filename

    counter = 1
    original_path = file_path
    while file_path.exists():
        file_path = upload_dir / f"{original_path.stem}_{counter}{original_path.suffix}"
        counter += 1

    contents = await file.read()
    file_path.write_bytes(contents)

    try:
        graph = load_graph(file_path)
    except PercolationError as e:
        file_path.unlink(missing_ok=True)
        raise http_error(e)

    logger.info(f"Stored uploaded graph {file_path} ({graph.n_vertices} vertices)")
    return UploadResponse(
        filename=file_path.name,
        spec=graph.spec(),
        n_vertices=graph.n_vertices,
        message="Graph uploaded successfully",
    )
