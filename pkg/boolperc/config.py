"""
Experiment configuration.

Values come from built-in defaults, then an optional key=value file, then
command-line flags (flags win). Environment: PERC_BUDGET (vertex budget),
PERC_DB_URL (run store), PERC_STORAGE (uploaded graph files).
"""
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from boolperc.sim.bounds import Constants
from boolperc.sim.errors import ConfigError
from boolperc.sim.graphs import Coords, GraphModel, model_from_spec
from boolperc.sim.radius_laws import RadiusLaw, law_from_spec

logger = logging.getLogger(__name__)

DEFAULT_DB_URL = "sqlite:///./boolperc.db"
DEFAULT_STORAGE = "storage/graphs"


def get_database_url() -> str:
    return os.environ.get("PERC_DB_URL", DEFAULT_DB_URL)


def get_storage_dir() -> Path:
    return Path(os.environ.get("PERC_STORAGE", DEFAULT_STORAGE))


def _split(value: Any) -> Any:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    if isinstance(value, (int, float)):
        return [value]
    return value


def parse_vertex(text: Optional[str]) -> Optional[Coords]:
    """'0,0' -> (0, 0); '' -> () for the tree root; None stays None."""
    if text is None:
        return None
    text = text.strip().strip("()")
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"invalid vertex {text!r}; expected comma-separated integers")


class ExperimentConfig(BaseModel):
    """Everything a subcommand needs; every output file embeds it."""

    model: str = "z:1"
    law: str = "const:1"
    p: List[float] = Field(default_factory=lambda: [0.1])
    r: List[int] = Field(default_factory=lambda: [1])
    window: Optional[int] = Field(default=None, ge=0)
    windows: List[int] = Field(default_factory=lambda: [100, 1000])
    replicas: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    jobs: int = 1
    dim: Optional[float] = Field(default=None, ge=0)
    c1: Optional[float] = Field(default=None, gt=0)
    budget: Optional[int] = Field(default=None, ge=1)
    vertex: Optional[str] = None
    eps: List[str] = Field(default_factory=lambda: ["1/2", "1/4", "1/8"])
    samples: int = Field(default=1, ge=1)
    sep: int = Field(default=2, ge=1)
    terms: int = Field(default=1000, ge=1)
    f0: List[str] = Field(default_factory=list)
    g_levels: List[str] = Field(default_factory=list)
    confidence: float = Field(default=0.95, gt=0, lt=1)
    output: Optional[str] = None
    plot: bool = False
    record: bool = False
    progress: bool = False

    @field_validator("p", "r", "windows", "eps", "f0", "g_levels", mode="before")
    @classmethod
    def split_grid(cls, value: Any) -> Any:
        return _split(value)

    @field_validator("p")
    @classmethod
    def check_p(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("p grid must not be empty")
        for x in value:
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"p must lie in [0, 1], got {x}")
        return value

    @field_validator("r", "windows")
    @classmethod
    def check_radii(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("grid must not be empty")
        if any(x < 0 for x in value):
            raise ValueError("radii must be >= 0")
        return value

    @field_validator("eps")
    @classmethod
    def check_eps(cls, value: List[str]) -> List[str]:
        for e in value:
            try:
                f = Fraction(e)
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"invalid eps {e!r}")
            if not 0 < f <= 1:
                raise ValueError(f"eps must lie in (0, 1], got {e}")
        return value

    def build_model(self) -> GraphModel:
        return model_from_spec(self.model, declared_dim=self.dim, declared_C1=self.c1)

    def build_law(self) -> RadiusLaw:
        return law_from_spec(self.law)

    def build_constants(self, model: GraphModel) -> Constants:
        return Constants.for_model(model, self.dim, self.c1)

    def center(self, model: GraphModel) -> Coords:
        v = parse_vertex(self.vertex)
        return model.origin() if v is None else v

    def eps_fractions(self) -> List[Fraction]:
        return [Fraction(e) for e in self.eps]

    def fractions(self, values: List[str]) -> List[Fraction]:
        try:
            return [Fraction(x) for x in values]
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"invalid rational list {values!r}")

    def apply_budget(self) -> None:
        if self.budget is not None:
            os.environ["PERC_BUDGET"] = str(self.budget)

    def echo(self) -> Dict[str, Any]:
        """The config as written into output headers."""
        return self.model_dump(exclude={"output", "plot", "record", "progress", "jobs"})


def load_config_file(path: "str | os.PathLike") -> Dict[str, str]:
    """Parse key=value lines; '#' starts a comment; keys may use '-' or '_'."""
    values: Dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def resolve_config(file_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Defaults < config file < explicit overrides (None values are ignored)."""
    merged: Dict[str, Any] = {}
    if file_path:
        merged.update(load_config_file(file_path))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    unknown = set(merged) - set(ExperimentConfig.model_fields)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        return ExperimentConfig(**merged)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(x) for x in first["loc"])
        raise ConfigError(f"invalid config value for {where}: {first['msg']}")
