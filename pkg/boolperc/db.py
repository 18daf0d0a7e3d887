"""Database configuration and session management for the run store."""
from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from boolperc.config import get_database_url

SQLALCHEMY_DATABASE_URL = get_database_url()


def make_engine(url: str):
    """SQLite gets check_same_thread off; in-memory SQLite shares one connection."""
    if not url.startswith("sqlite"):
        return create_engine(url)
    kwargs = {"connect_args": {"check_same_thread": False}}
    if url in ("sqlite://", "sqlite:///:memory:"):
        kwargs["poolclass"] = StaticPool
    return create_engine(url, **kwargs)


engine = make_engine(SQLALCHEMY_DATABASE_URL)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()


def get_db():
    """
    Dependency function to get database session.
    Yields a database session and ensures it's closed after use.
    """
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_db(bind=None):
    """Create the run store tables."""
    from boolperc import models  # noqa: F401  registers the tables
    Base.metadata.create_all(bind=bind or engine)
