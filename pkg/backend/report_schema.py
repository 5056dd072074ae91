# backend/report_schema.py
from datetime import datetime
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Cell = Union[int, float, str]


class ExperimentReport(BaseModel):
    """One seeded experiment run: parameters, per-sample rows and summaries.

    Everything except `wall_clock`, `id` and `created_at` is a pure function of
    (name, parameters, seed).
    """

    model_config = ConfigDict(from_attributes=True)

    name: str
    parameters: Dict[str, Any]
    seed: int
    columns: List[str]
    rows: List[List[Cell]]
    aggregates: Dict[str, Dict[str, float]] = {}
    wall_clock: float = 0.0
    id: Optional[int] = None
    created_at: Optional[datetime] = None

    @model_validator(mode="after")
    def check_rows(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")
        return self

    def column(self, name: str) -> List[Cell]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def to_tsv(self) -> str:
        lines = ["\t".join(self.columns)]
        lines += ["\t".join(_cell(x) for x in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        parts = [f"experiment={self.name}", f"seed={self.seed}", f"samples={len(self.rows)}"]
        for column, stats in self.aggregates.items():
            parts.append(" ".join(f"{column}.{key}={value:.6g}" for key, value in stats.items()))
        parts.append(f"wall_clock={self.wall_clock:.2f}s")
        return "# " + " ".join(parts)


def _cell(x: Cell) -> str:
    return repr(x) if isinstance(x, float) else str(x)


class ExperimentRequest(BaseModel):
    name: str
    seed: int = Field(ge=0, lt=2**64)
    params: Dict[str, str] = {}
    store: bool = False

    @field_validator("name")
    @classmethod
    def validate_name(cls, v):
        v = v.strip()
        if not v:
            raise ValueError("experiment name is required")
        return v


class ExperimentSummary(BaseModel):
    id: int
    name: str
    seed: int
    samples: int
    wall_clock: float
    created_at: Optional[datetime] = None
