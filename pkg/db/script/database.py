from functools import lru_cache

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from anisotrap.core.settings import get_settings
from db.script.models import Base


@lru_cache(maxsize=4)
def get_engine(url: str = None):
    url = url or get_settings().history_url
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    engine = create_engine(url, connect_args=connect_args)
    Base.metadata.create_all(bind=engine)
    return engine


def SessionLocal(url: str = None):
    return sessionmaker(autocommit=False, autoflush=False, bind=get_engine(url))()


if __name__ == "__main__":
    print("Creating tables...")
    Base.metadata.create_all(bind=get_engine())
