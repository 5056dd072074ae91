# backend/reduction_schema.py
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

Clause = Tuple[int, int, int]


class SatFormula(BaseModel):
    """3-CNF formula; literals are DIMACS integers (+i for x_i, -i for not x_i)."""

    model_config = ConfigDict(frozen=True)

    num_vars: int
    clauses: Tuple[Clause, ...]

    @field_validator("num_vars")
    @classmethod
    def validate_num_vars(cls, v):
        if v < 1:
            raise ValueError(f"a formula needs at least one variable, got {v}")
        return v

    @model_validator(mode="after")
    def check_clauses(self):
        for j, clause in enumerate(self.clauses, start=1):
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {j}: literal {lit} outside 1..{self.num_vars}")
            if len({abs(lit) for lit in clause}) != 3:
                raise ValueError(f"clause {j} repeats a variable: {list(clause)}")
        return self

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: List[bool]) -> bool:
        if len(assignment) != self.num_vars:
            raise ValueError(f"expected {self.num_vars} truth values, got {len(assignment)}")
        return all(
            any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause)
            for clause in self.clauses
        )
