# backend/graph_schema.py
from typing import List, Optional, Tuple

from pydantic import BaseModel, field_validator, model_validator


class GraphSource(BaseModel):
    """A graph given either as edge-list text or as a family/random spec string."""

    graph: Optional[str] = None
    spec: Optional[str] = None

    @model_validator(mode="after")
    def check_source(self):
        if (self.graph is None) == (self.spec is None):
            raise ValueError("give exactly one of 'graph' (edge-list text) or 'spec'")
        return self


class GenerateRequest(BaseModel):
    spec: str

    @field_validator("spec")
    @classmethod
    def validate_spec(cls, v):
        if ":" not in v:
            raise ValueError("spec must look like kind:parameters, e.g. fan:12")
        return v


class GenerateResponse(BaseModel):
    label: str
    n: int
    m: int
    edges: List[Tuple[int, int]]
    text: str


class SolveRequest(GraphSource):
    method: str = "brute"
    variant: str = "resolving"


class VerifyRequest(GraphSource):
    members: List[int]
    variant: str = "resolving"


class VerifyResponse(BaseModel):
    resolved: bool
    witness: Optional[Tuple[int, int]] = None
    vectors: Optional[List[List[int]]] = None


class CanonRequest(GraphSource):
    pass
