"""Boolean discrete percolation on doubling graphs: simulation engine, CLI and HTTP API."""
__version__ = "0.1.0"
