"""FastAPI application entry point."""
import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from boolperc import __version__
from boolperc.db import init_db
from boolperc.routes import analysis, events, graphs, runs

logger = logging.getLogger(__name__)

# Create FastAPI app
app = FastAPI(
    title="boolperc",
    description="Boolean discrete percolation on doubling graphs: geometry, Monte Carlo events, bounds and a run store",
    version=__version__,
)

# CORS middleware for notebook and browser clients
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.on_event("startup")
def startup_event():
    """Initialize the run store on startup."""
    init_db()


# Register routers
app.include_router(graphs.router)
app.include_router(events.router)
app.include_router(analysis.router)
app.include_router(runs.router)


@app.get("/")
def root():
    """Root endpoint."""
    return {
        "message": "boolperc percolation service",
        "version": __version__,
        "docs": "/docs",
    }


def start():
    """Entry point for the 'app' script."""
    import uvicorn

    logging.basicConfig(level=logging.INFO)
    uvicorn.run("boolperc.main:app", host="0.0.0.0", port=8000, reload=False)


if __name__ == "__main__":
    start()
