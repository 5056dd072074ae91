# backend/result_schema.py
from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator


class Method(str, Enum):
    brute_force = "brute_force"
    closed_form = "closed_form"
    tree_formula = "tree_formula"
    ich = "ich"


class BetaResult(BaseModel):
    """Size of a resolving set together with the set itself."""

    model_config = ConfigDict(frozen=True)

    beta: int
    witness: List[int]
    method: Method

    @model_validator(mode="after")
    def check_witness(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if len(self.witness) != self.beta:
            raise ValueError(f"witness has {len(self.witness)} members, beta is {self.beta}")
        return self

    def summary(self) -> str:
        return f"beta={self.beta} witness={','.join(str(v) for v in self.witness)}"


class BetaInterval(BaseModel):
    model_config = ConfigDict(frozen=True)

    lo: int
    hi: int

    @model_validator(mode="after")
    def check_order(self):
        if self.lo > self.hi:
            raise ValueError(f"interval lower end {self.lo} exceeds upper end {self.hi}")
        return self

    def __contains__(self, value: int) -> bool:
        return self.lo <= value <= self.hi


class EntropyState(BaseModel):
    """Partition induced by the landmarks chosen so far (entropy in nats)."""

    model_config = ConfigDict(frozen=True)

    members: List[int]
    classes: List[List[int]]
    class_count: int
    entropy: float

    @model_validator(mode="after")
    def check_partition(self):
        if self.class_count != len(self.classes):
            raise ValueError("class_count must equal the number of classes")
        return self

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.classes)


class SbmAllocation(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: List[int]
    bound: float

    @property
    def total(self) -> int:
        return sum(self.k)


class Beta2Report(BaseModel):
    """Necessary properties of a graph resolved by the pair (u, v)."""

    pair: Tuple[int, int]
    no_k5_subgraph: bool
    no_k33_subgraph: bool
    unique_shortest_path: bool
    path_degrees_at_most_5: bool
    endpoint_degrees_at_most_3: bool
    path: List[int]

    @property
    def all_hold(self) -> bool:
        return (
            self.no_k5_subgraph
            and self.no_k33_subgraph
            and self.unique_shortest_path
            and self.path_degrees_at_most_5
            and self.endpoint_degrees_at_most_3
        )
