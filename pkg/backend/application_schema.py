# backend/application_schema.py
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator


class SpreadObservation(BaseModel):
    model_config = ConfigDict(frozen=True)

    observer: int
    arrival_time: int


class CanonicalForm(BaseModel):
    """Flattened adjacency matrix in canonical vertex order.

    `labeling[v]` is the canonical position of input vertex v.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    matrix: Tuple[int, ...]
    labeling: Tuple[int, ...]

    @model_validator(mode="after")
    def check_shape(self):
        if len(self.matrix) != self.n * self.n or len(self.labeling) != self.n:
            raise ValueError("matrix must hold n*n entries and labeling n positions")
        return self

    @property
    def key(self) -> Tuple[int, Tuple[int, ...]]:
        """Hashable certificate; equal keys mean isomorphic graphs."""
        return (self.n, self.matrix)

    def rows(self) -> List[str]:
        return ["".join(str(x) for x in self.matrix[i * self.n:(i + 1) * self.n]) for i in range(self.n)]


class HighDegreeLabeling(BaseModel):
    selected: List[int]
    labels: List[str]
    patterns_unique: bool
    degrees_distinct: bool

    @property
    def success(self) -> bool:
        return self.patterns_unique and self.degrees_distinct


class SequenceEmbedding(BaseModel):
    a: int
    k: int
    landmarks: List[str]
    sequences: List[str]
    vectors: List[List[int]]
    injective: bool
    complete: bool

    @model_validator(mode="after")
    def check_dimensions(self):
        if any(len(v) != len(self.landmarks) for v in self.vectors):
            raise ValueError("every vector needs one coordinate per landmark")
        return self

    def to_csv(self) -> str:
        header = "sequence," + ",".join(self.landmarks)
        rows = [s + "," + ",".join(str(x) for x in v) for s, v in zip(self.sequences, self.vectors)]
        return "\n".join([header] + rows) + "\n"
