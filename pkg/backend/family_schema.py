# backend/family_schema.py
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FamilyKind = Literal[
    "path", "cycle", "complete", "complete_bipartite", "grid", "fan", "wheel",
    "hypercube", "hamming", "honeycomb", "hexagon", "prism", "petersen2",
    "join", "disjoint_union", "empty",
]

RandomKind = Literal["uniform_tree", "erdos_renyi", "sbm"]

# Smallest admissible n for the kinds parameterised by a single n.
MIN_N = {
    "path": 1,
    "cycle": 3,
    "complete": 1,
    "fan": 1,
    "wheel": 3,
    "honeycomb": 1,
    "hexagon": 1,
    "prism": 3,
    "petersen2": 5,
    "empty": 1,
}


class FamilySpec(BaseModel):
    """A deterministic graph family with its parameters."""

    model_config = ConfigDict(frozen=True)

    kind: FamilyKind
    n: Optional[int] = None
    s: Optional[int] = None
    t: Optional[int] = None
    dims: Optional[Tuple[int, ...]] = None
    k: Optional[int] = None
    a: Optional[int] = None
    left: Optional["FamilySpec"] = None
    right: Optional["FamilySpec"] = None

    @model_validator(mode="after")
    def check_parameters(self):
        kind = self.kind
        if kind in MIN_N:
            if self.n is None:
                raise ValueError(f"{kind} requires n")
            if self.n < MIN_N[kind]:
                raise ValueError(f"{kind} requires n >= {MIN_N[kind]}, got {self.n}")
        elif kind == "complete_bipartite":
            if self.s is None or self.t is None or self.s < 1 or self.t < 1:
                raise ValueError("complete_bipartite requires s >= 1 and t >= 1")
        elif kind == "grid":
            if not self.dims:
                raise ValueError("grid requires at least one dimension")
            if min(self.dims) < 1:
                raise ValueError(f"grid dimensions must be >= 1, got {list(self.dims)}")
        elif kind == "hypercube":
            if self.k is None or self.k < 1:
                raise ValueError("hypercube requires k >= 1")
        elif kind == "hamming":
            if self.k is None or self.k < 1:
                raise ValueError("hamming requires k >= 1")
            if self.a is None or self.a < 2:
                raise ValueError("hamming requires an alphabet size a >= 2")
        elif kind in ("join", "disjoint_union"):
            if self.left is None or self.right is None:
                raise ValueError(f"{kind} requires two operand families")
        return self

    @property
    def label(self) -> str:
        """Spec string accepted by family_service.parse_spec."""
        if self.kind in MIN_N:
            return f"{self.kind}:{self.n}"
        if self.kind == "complete_bipartite":
            return f"complete_bipartite:{self.s}x{self.t}"
        if self.kind == "grid":
            return "grid:" + "x".join(str(x) for x in self.dims)
        if self.kind == "hypercube":
            return f"hypercube:{self.k}"
        if self.kind == "hamming":
            return f"hamming:k={self.k},a={self.a}"
        return f"{self.kind}:({self.left.label})/({self.right.label})"


class RandomSpec(BaseModel):
    """A random graph model plus the seed that fixes the sample."""

    model_config = ConfigDict(frozen=True)

    kind: RandomKind
    seed: int = Field(ge=0, lt=2**64)
    n: Optional[int] = None
    p: Optional[float] = None
    sizes: Optional[Tuple[int, ...]] = None
    probs: Optional[Tuple[Tuple[float, ...], ...]] = None

    @field_validator("p")
    @classmethod
    def validate_probability(cls, v):
        if v is not None and not 0.0 <= v <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {v}")
        return v

    @model_validator(mode="after")
    def check_parameters(self):
        if self.kind in ("uniform_tree", "erdos_renyi"):
            if self.n is None or self.n < 1:
                raise ValueError(f"{self.kind} requires n >= 1")
            if self.kind == "erdos_renyi" and self.p is None:
                raise ValueError("erdos_renyi requires p")
        else:
            if not self.sizes or min(self.sizes) < 1:
                raise ValueError("sbm requires positive community sizes")
            c = len(self.sizes)
            if self.probs is None or len(self.probs) != c or any(len(row) != c for row in self.probs):
                raise ValueError(f"sbm requires a {c}x{c} probability matrix")
            for i in range(c):
                for j in range(c):
                    if not 0.0 <= self.probs[i][j] <= 1.0:
                        raise ValueError(f"probability P[{i}][{j}] = {self.probs[i][j]} outside [0, 1]")
                    if self.probs[i][j] != self.probs[j][i]:
                        raise ValueError("sbm probability matrix must be symmetric")
        return self

    @property
    def label(self) -> str:
        if self.kind == "uniform_tree":
            return f"tree:n={self.n},seed={self.seed}"
        if self.kind == "erdos_renyi":
            return f"er:n={self.n},p={self.p},seed={self.seed}"
        sizes = "x".join(str(s) for s in self.sizes)
        probs = "x".join(str(x) for row in self.probs for x in row)
        return f"sbm:sizes={sizes},p={probs},seed={self.seed}"


FamilySpec.model_rebuild()
