from datetime import datetime

from sqlalchemy import Boolean, Column, DateTime, Float, Index, Integer, String, Text
from sqlalchemy.orm import declarative_base

Base = declarative_base()


class RunRecord(Base):
    """시나리오 실행 이력을 저장하는 테이블"""

    __tablename__ = "run_history"

    id = Column(Integer, primary_key=True, autoincrement=True)
    scenario = Column(String(100), nullable=False)
    seed = Column(Integer, nullable=False)
    regime = Column(String(20), nullable=False)
    degree = Column(Integer, nullable=False)
    energy = Column(Float, nullable=False)
    energy_gp = Column(Float)
    psi6 = Column(Float)  # bulk 영점이 부족하면 NULL
    converged = Column(Boolean, nullable=False)
    wall_time = Column(Float)
    version = Column(String(20))
    manifest_path = Column(Text, nullable=False)
    created_at = Column(DateTime, default=datetime.now)

    __table_args__ = (
        Index("idx_run_scenario", "scenario"),
        Index("idx_run_created_at", "created_at"),
    )

    def __repr__(self):
        return f"<RunRecord(scenario={self.scenario}, seed={self.seed}, energy={self.energy}, converged={self.converged})>"
