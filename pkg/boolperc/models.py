"""SQLAlchemy ORM models for the run store."""
import json
from typing import Any, Dict, Iterable

from sqlalchemy import Column, DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import Session, relationship
from sqlalchemy.sql import func

from boolperc.db import Base


class ExperimentRun(Base):
    """One CLI or HTTP invocation, with its full config echo."""
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    subcommand = Column(String, nullable=False, index=True)
    model = Column(String, nullable=False)
    law = Column(String, nullable=False)
    config_json = Column(Text, nullable=False)
    seed = Column(String, nullable=False)  # 64-bit seeds overflow SQLite INTEGER
    created_at = Column(DateTime(timezone=True), server_default=func.now())

    estimates = relationship("EstimateRow", back_populates="run", cascade="all, delete-orphan")

    @property
    def config(self) -> Dict[str, Any]:
        return json.loads(self.config_json)


class EstimateRow(Base):
    """A Monte Carlo estimate; columns follow the CSV export."""
    __tablename__ = "estimate_rows"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False, index=True)
    event_kind = Column(String, nullable=False)
    model = Column(String, nullable=False)
    p = Column(Float, nullable=False)
    law = Column(String, nullable=False)
    r = Column(Integer, nullable=False)
    replicas = Column(Integer, nullable=False)
    p_hat = Column(Float, nullable=False)
    ci_lo = Column(Float, nullable=False)
    ci_hi = Column(Float, nullable=False)
    seed = Column(String, nullable=False)

    run = relationship("ExperimentRun", back_populates="estimates")


def record_run(db: Session, subcommand: str, config: Dict[str, Any], rows: Iterable[Dict[str, Any]] = ()) -> ExperimentRun:
    """Store a run and its estimate rows; returns the refreshed run."""
    run = ExperimentRun(
        subcommand=subcommand,
        model=str(config.get("model", "")),
        law=str(config.get("law", "")),
        config_json=json.dumps(config, sort_keys=True, default=str),
        seed=str(config.get("seed", 0)),
    )
    for row in rows:
        run.estimates.append(EstimateRow(
            event_kind=row["event_kind"],
            model=row["model"],
            p=row["p"],
            law=row["law"],
            r=row["r"],
            replicas=row["replicas"],
            p_hat=row["p_hat"],
            ci_lo=row["ci_lo"],
            ci_hi=row["ci_hi"],
            seed=str(row["seed"]),
        ))
    db.add(run)
    db.commit()
    db.refresh(run)
    return run
