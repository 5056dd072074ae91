# backend/graph_service.py
import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _components
from scipy.sparse.csgraph import shortest_path

from errors import InputError, MetricDimensionError

logger = logging.getLogger(__name__)

# Unreachable-pair sentinel: strictly larger than any finite distance.
INF = int(np.iinfo(np.int64).max)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected unweighted graph on vertices 0..n-1.

    Edges are normalised on construction to sorted (u, v) pairs with u < v and
    duplicates collapsed; self-loops and out-of-range endpoints are rejected.
    """

    n: int
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise InputError(f"vertex count must be nonnegative, got {self.n}")
        arr = np.asarray(list(self.edges), dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= self.n:
                bad = arr[(arr < 0).any(axis=1) | (arr >= self.n).any(axis=1)][0]
                raise InputError(f"edge ({bad[0]}, {bad[1]}) has an endpoint outside 0..{self.n - 1}")
            if (arr[:, 0] == arr[:, 1]).any():
                loop = int(arr[arr[:, 0] == arr[:, 1]][0, 0])
                raise InputError(f"self-loop at vertex {loop}")
            lo = np.minimum(arr[:, 0], arr[:, 1])
            hi = np.maximum(arr[:, 0], arr[:, 1])
            keys = np.unique(lo * self.n + hi)
            arr = np.stack([keys // self.n, keys % self.n], axis=1)
        object.__setattr__(self, "edges", tuple(zip(arr[:, 0].tolist(), arr[:, 1].tolist())))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        arr = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        arr.setflags(write=False)
        return arr

    @cached_property
    def adjacency(self) -> csr_matrix:
        e = self.edge_array
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(rows.size, dtype=np.int8)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.diff(self.adjacency.indptr).astype(np.int64)
        deg.setflags(write=False)
        return deg

    @cached_property
    def neighbors(self) -> Tuple[Tuple[int, ...], ...]:
        adj = self.adjacency
        indptr, indices = adj.indptr, adj.indices
        return tuple(
            tuple(sorted(indices[indptr[v]:indptr[v + 1]].tolist())) for v in range(self.n)
        )

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def induced_subgraph(self, vertices: Sequence[int]) -> "Graph":
        """Subgraph on `vertices`, relabelled 0..k-1 in the given order."""
        index = {v: i for i, v in enumerate(vertices)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph(len(vertices), tuple(edges))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph in which vertex v is renamed perm[v]."""
        if sorted(perm) != list(range(self.n)):
            raise InputError("relabelling must be a permutation of 0..n-1")
        return Graph(self.n, tuple((perm[u], perm[v]) for u, v in self.edges))


class DistanceMatrix:
    """n x n table of pairwise distances with INF for unreachable pairs."""

    def __init__(self, values):
        arr = np.array(values, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {arr.shape}")
        arr.setflags(write=False)
        self.values = arr

    @property
    def n(self) -> int:
        return self.values.shape[0]

    # Table protocol shared with GeneralTable
    @property
    def n_rows(self) -> int:
        return self.n

    @property
    def n_cols(self) -> int:
        return self.n

    def columns(self, members: Sequence[int]) -> np.ndarray:
        return self.values[:, list(members)]

    def is_finite(self) -> bool:
        return not bool((self.values == INF).any())

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.values, self.values.T))

    def __repr__(self) -> str:
        return f"DistanceMatrix(n={self.n})"


def _to_sentinel(dist: np.ndarray) -> np.ndarray:
    out = np.full(dist.shape, INF, dtype=np.int64)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.int64)
    return out


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Row of shortest-path lengths from `source`, INF where unreachable."""
    if not 0 <= source < g.n:
        raise InputError(f"source {source} out of range for a graph on {g.n} vertices")
    dist = shortest_path(g.adjacency, directed=False, unweighted=True, indices=source)
    return _to_sentinel(dist)


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    if g.n == 0:
        return DistanceMatrix(np.zeros((0, 0), dtype=np.int64))
    dist = shortest_path(g.adjacency, directed=False, unweighted=True)
    return DistanceMatrix(_to_sentinel(dist))


def truncate_distances(d: DistanceMatrix, k: int) -> DistanceMatrix:
    """Cap every entry at k+1; INF entries become k+1 as well."""
    if k < 1:
        raise InputError(f"truncation level must be at least 1, got {k}")
    return DistanceMatrix(np.minimum(d.values, k + 1))


def diameter(g: Graph) -> int:
    if g.n <= 1:
        return 0
    values = all_pairs_distances(g).values
    if (values == INF).any():
        return INF
    return int(values.max())


def connected_components(g: Graph) -> List[List[int]]:
    """Vertex lists of the components, ordered by smallest member."""
    if g.n == 0:
        return []
    count, labels = _components(g.adjacency, directed=False)
    groups: Dict[int, List[int]] = defaultdict(list)
    for v, label in enumerate(labels.tolist()):
        groups[label].append(v)
    return sorted(groups.values(), key=lambda members: members[0])


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def is_tree(g: Graph) -> bool:
    return g.n >= 1 and g.m == g.n - 1 and is_connected(g)


def are_twins(g: Graph, u: int, v: int) -> bool:
    """N(u) minus v equals N(v) minus u, so every other vertex sees both alike."""
    nu = set(g.neighbors[u]) - {v}
    nv = set(g.neighbors[v]) - {u}
    return nu == nv


def twin_classes(g: Graph) -> List[List[int]]:
    """Partition of the vertices into twin classes, ordered by smallest member.

    A class is either a clique of vertices sharing a closed neighbourhood or an
    independent set of vertices sharing an open one; a vertex cannot have twins
    of both kinds, so grouping by both keys yields the equivalence classes.
    """
    by_open: Dict[frozenset, List[int]] = defaultdict(list)
    by_closed: Dict[frozenset, List[int]] = defaultdict(list)
    for v in range(g.n):
        nbrs = frozenset(g.neighbors[v])
        by_open[nbrs].append(v)
        by_closed[nbrs | {v}].append(v)

    owner: Dict[int, Tuple[int, ...]] = {}
    for group in list(by_closed.values()) + list(by_open.values()):
        if len(group) > 1:
            for v in group:
                owner[v] = tuple(group)

    classes: List[List[int]] = []
    seen = set()
    for v in range(g.n):
        if v in seen:
            continue
        members = list(owner.get(v, (v,)))
        seen.update(members)
        classes.append(members)

    for members in classes:
        for u, w in zip(members, members[1:]):
            if not are_twins(g, u, w):
                raise MetricDimensionError(f"twin relation not transitive at ({u}, {w})")
    return classes


# --- text formats -----------------------------------------------------------

def parse_edge_list(text: str) -> Tuple[Graph, Dict[str, str]]:
    """Parse "n m" followed by m "u v" lines; "# key: value" lines become metadata."""
    metadata: Dict[str, str] = {}
    rows: List[Tuple[int, List[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                metadata[key.strip()] = value.strip()
            continue
        rows.append((lineno, line.split()))

    if not rows:
        raise InputError("edge list is empty: expected a header line 'n m'")
    lineno, header = rows[0]
    try:
        n, m = (int(tok) for tok in header)
    except ValueError:
        raise InputError(f"line {lineno}: header must be 'n m', got {' '.join(header)!r}")
    if len(rows) - 1 != m:
        raise InputError(f"header announces {m} edges but {len(rows) - 1} edge lines follow")

    edges = []
    for lineno, parts in rows[1:]:
        try:
            u, v = (int(tok) for tok in parts)
        except ValueError:
            raise InputError(f"line {lineno}: expected 'u v', got {' '.join(parts)!r}")
        edges.append((u, v))
    return Graph(n, tuple(edges)), metadata


def format_edge_list(g: Graph, metadata: Optional[Dict[str, str]] = None) -> str:
    lines = [f"# {key}: {value}" for key, value in (metadata or {}).items()]
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def read_edge_list(path) -> Tuple[Graph, Dict[str, str]]:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def write_edge_list(path, g: Graph, metadata: Optional[Dict[str, str]] = None) -> None:
    Path(path).write_text(format_edge_list(g, metadata), encoding="utf-8")


def distance_csv(d: DistanceMatrix) -> str:
    def cell(x: int) -> str:
        return "inf" if x == INF else str(x)

    return "".join(",".join(cell(x) for x in row) + "\n" for row in d.values.tolist())


def parse_distance_csv(text: str) -> DistanceMatrix:
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rows.append([INF if tok.strip() == "inf" else int(tok) for tok in line.split(",")])
    return DistanceMatrix(rows)


def parse_vertex_list(text: str) -> List[int]:
    """Comma-separated vertex indices, e.g. "0,3,7"."""
    text = text.strip()
    if not text:
        return []
    try:
        members = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise InputError(f"vertex list must be comma-separated integers, got {text!r}")
    if len(set(members)) != len(members):
        raise InputError(f"vertex list {text!r} repeats a vertex")
    return members


def check_members(n: int, members: Iterable[int]) -> List[int]:
    members = list(members)
    for v in members:
        if not 0 <= v < n:
            raise InputError(f"vertex {v} out of range for {n} rows")
    if len(set(members)) != len(members):
        raise InputError("vertex set repeats a member")
    return members
