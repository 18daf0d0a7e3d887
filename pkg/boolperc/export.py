"""
CSV and JSON writers for experiment outputs.

CSV files start with two comment lines, `# generated <timestamp>` and
`# config <json>`, followed by a header row and the data rows. Only the
timestamp line changes between identical runs.
"""
import json
import logging
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

ESTIMATE_COLUMNS = ["event_kind", "model", "p", "law", "r", "replicas", "p_hat", "ci_lo", "ci_hi", "seed"]


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def config_line(config: Dict[str, Any]) -> str:
    return json.dumps(config, sort_keys=True, default=_jsonable)


def write_csv(
    frame: pd.DataFrame,
    path: "str | Path",
    config: Dict[str, Any],
    columns: Optional[Sequence[str]] = None,
    generated: Optional[datetime] = None,
) -> Path:
    """Write `frame` (restricted to `columns`, in order) with the config header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if columns is not None:
        frame = frame.reindex(columns=list(columns))
    stamp = (generated or datetime.now(timezone.utc)).isoformat(timespec="seconds")
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# generated {stamp}\n")
        fh.write(f"# config {config_line(config)}\n")
        frame.to_csv(fh, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_csv(path: "str | Path") -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def csv_body(path: "str | Path") -> str:
    """Everything but the timestamp line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines(keepends=True)
    return "".join(line for line in lines if not line.startswith("# generated"))


def write_json(path: "str | Path", config: Dict[str, Any], results: Dict[str, Any]) -> Path:
    """One object per run: the config echo plus result arrays."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config,
        "results": results,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_output(
    path: "str | Path",
    frame: pd.DataFrame,
    config: Dict[str, Any],
    columns: Optional[Sequence[str]] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """CSV unless the path ends in .json."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        results: Dict[str, Any] = {"rows": _records(frame, columns)}
        results.update(extra or {})
        return write_json(path, config, results)
    return write_csv(frame, path, config, columns)


def _records(frame: pd.DataFrame, columns: Optional[Sequence[str]]) -> List[Dict[str, Any]]:
    if columns is not None:
        frame = frame.reindex(columns=list(columns))
    return json.loads(frame.to_json(orient="records"))
