# backend/report_model.py
from sqlalchemy import Column, DateTime, Float, Integer, String, Text
from sqlalchemy.sql import func
from db import Base


class ExperimentRecord(Base):
    __tablename__ = "experiments"

    id = Column(Integer, primary_key=True, index=True)
    name = Column(String, index=True, nullable=False)
    seed = Column(String, nullable=False)  # may exceed a signed 64-bit column
    parameters = Column(Text, nullable=False)  # JSON
    columns = Column(Text, nullable=False)  # JSON list of row keys
    rows = Column(Text, nullable=False)  # JSON list of lists
    aggregates = Column(Text, nullable=False)  # JSON
    wall_clock = Column(Float, nullable=False)
    created_at = Column(DateTime(timezone=True), server_default=func.now())
